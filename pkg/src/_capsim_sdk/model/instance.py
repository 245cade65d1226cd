from pathlib import Path
from typing import Optional
from typing import Union

import numpy as np
from pydantic import root_validator

from _capsim_sdk.core.models import frozen_array
from _capsim_sdk.core.models import Model
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.exceptions import DimensionMismatchError
from _capsim_sdk.model.models import CampaignSet
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import AuctionRule
from _capsim_sdk.model.rules import DenseBidTable
from _capsim_sdk.model.rules import EmbeddingBids
from _capsim_sdk.model.rules import FirstPriceRule
from _capsim_sdk.model.rules import KeywordBids
from _capsim_sdk.synthetic.valuation import valuation_matrix

_INSTANCE_FORMAT = 1


class Instance(Model):
    """
    A replayable problem: events, campaigns with budgets, and the bids a first-price rule is built from.

    Embedding instances carry `campaign_vectors` (K, d); keyword instances carry `bid_matrix` (W, K).

    Instances save to a compressed `.npz` file holding the arrays plus header fields `format`, `kind`, `n_events`,
    `n_campaigns`, `dim` and `seed`.
    """

    events: EventStream
    campaigns: CampaignSet
    campaign_vectors: Optional[np.ndarray] = None
    bid_matrix: Optional[np.ndarray] = None
    seed: Optional[int] = None

    @root_validator(skip_on_failure=True)
    def _check_shapes(cls, values):  # noqa
        events, campaigns = values["events"], values["campaigns"]
        K = campaigns.n_campaigns
        if events.kind == PayloadKind.EMBEDDING:
            vectors = values.get("campaign_vectors")
            if vectors is None:
                raise ValueError("Embedding instances need campaign_vectors.")
            vectors = frozen_array(vectors, dtype=np.float64)
            if vectors.shape[0] != K:
                raise DimensionMismatchError("campaign_vectors", K, vectors.shape[0])
            if vectors.shape[1] != events.dim:
                raise DimensionMismatchError(
                    "campaign vector dimension", events.dim, vectors.shape[1]
                )
            values["campaign_vectors"] = vectors
        else:
            matrix = values.get("bid_matrix")
            if matrix is None:
                raise ValueError("Keyword instances need a bid_matrix.")
            matrix = frozen_array(matrix, dtype=np.float64)
            if matrix.shape[1] != K:
                raise DimensionMismatchError("bid_matrix", K, matrix.shape[1])
            values["bid_matrix"] = matrix
        return values

    @property
    def kind(self) -> PayloadKind:
        return PayloadKind(self.events.kind)

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def n_campaigns(self) -> int:
        return self.campaigns.n_campaigns

    @property
    def budgets(self) -> np.ndarray:
        return self.campaigns.budgets

    def rule(self, table_cap: int = 20_000_000) -> AuctionRule:
        """
        First-price rule for this instance. Embedding valuations are precomputed into a dense table when
        N * K <= `table_cap`, and computed per evaluated chunk otherwise.
        """
        if self.kind == PayloadKind.KEYWORD:
            return FirstPriceRule(KeywordBids(self.bid_matrix))
        if self.n_events * self.n_campaigns <= table_cap:
            table = np.empty((int(self.events.ids.max()), self.n_campaigns))
            table[self.events.ids - 1] = valuation_matrix(
                self.events.payloads, self.campaign_vectors
            )
            return FirstPriceRule(DenseBidTable(table))
        return FirstPriceRule(EmbeddingBids(self.campaign_vectors))

    def with_budgets(self, budgets) -> "Instance":
        return Instance(
            events=self.events,
            campaigns=CampaignSet(budgets=budgets),
            campaign_vectors=self.campaign_vectors,
            bid_matrix=self.bid_matrix,
            seed=self.seed,
        )

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        arrays = {
            "format": np.array(_INSTANCE_FORMAT),
            "kind": np.array(str(self.kind.value)),
            "n_events": np.array(self.n_events),
            "n_campaigns": np.array(self.n_campaigns),
            "dim": np.array(self.events.dim),
            "seed": np.array(-1 if self.seed is None else self.seed),
            "payloads": self.events.payloads,
            "ids": self.events.ids,
            "budgets": self.budgets,
        }
        if self.campaign_vectors is not None:
            arrays["campaign_vectors"] = self.campaign_vectors
        if self.bid_matrix is not None:
            arrays["bid_matrix"] = self.bid_matrix
        with path.open("wb") as f:
            np.savez_compressed(f, **arrays)
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Instance":
        with np.load(Path(path), allow_pickle=False) as data:
            if int(data["format"]) != _INSTANCE_FORMAT:
                raise ValueError(f"Unsupported instance file format {int(data['format'])}.")
            seed = int(data["seed"])
            return cls(
                events=EventStream(
                    kind=PayloadKind(str(data["kind"])),
                    payloads=data["payloads"],
                    ids=data["ids"],
                ),
                campaigns=CampaignSet(budgets=data["budgets"]),
                campaign_vectors=data["campaign_vectors"]
                if "campaign_vectors" in data.files
                else None,
                bid_matrix=data["bid_matrix"] if "bid_matrix" in data.files else None,
                seed=None if seed < 0 else seed,
            )
