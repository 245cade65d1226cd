import logging
from csv import DictWriter
from pathlib import Path
from typing import Iterable
from typing import List
from typing import Sequence
from typing import TextIO
from typing import Union

import numpy as np

from _capsim_sdk.bidlog.models import BidLog
from _capsim_sdk.bidlog.models import BidLogManifest
from _capsim_sdk.bidlog.models import BidRecord
from _capsim_sdk.bidlog.models import KeywordModel
from _capsim_sdk.core.models import CSVRowError
from _capsim_sdk.enums import PayloadKind
from _capsim_sdk.exceptions import BidLogParseError
from _capsim_sdk.exceptions import DayNotFoundError
from _capsim_sdk.exceptions import EmptySampleError
from _capsim_sdk.model.models import EventStream
from _capsim_sdk.model.rules import FirstPriceRule
from _capsim_sdk.model.rules import KeywordBids

logger = logging.getLogger("capsim.bidlog")

PathOrFile = Union[str, Path, TextIO]

_FIELDNAMES = ["day", "advertiser_id", "keyword_id", "bid", "count"]


def _sorted_ids(ids: Iterable[str]) -> List[str]:
    unique = set(ids)
    if all(i.lstrip("-").isdigit() for i in unique):
        return sorted(unique, key=int)
    return sorted(unique)


def _parse_records(file: TextIO) -> List[BidRecord]:
    try:
        return list(BidRecord.parse_csv(file))
    except CSVRowError as err:
        raise BidLogParseError(err.line, err.msg)


def load_bid_log(path: PathOrFile) -> BidLog:
    """
    Parse a bid-log CSV with header `day,advertiser_id,keyword_id,bid,count` into a `BidLog`.

    Raises `BidLogParseError` with the line number of the first invalid row (including non-positive bids and
    counts). An empty file gives an empty log.
    """
    if isinstance(path, (str, Path)):
        with open(path, newline="", encoding="utf-8") as file:
            records = _parse_records(file)
    else:
        records = _parse_records(path)

    advertiser_ids = _sorted_ids(r.advertiser_id for r in records)
    keyword_ids = _sorted_ids(r.keyword_id for r in records)
    advertiser_index = {a: i for i, a in enumerate(advertiser_ids)}
    keyword_index = {k: i for i, k in enumerate(keyword_ids)}
    log = BidLog(
        day=[r.day for r in records],
        advertiser=[advertiser_index[r.advertiser_id] for r in records],
        keyword=[keyword_index[r.keyword_id] for r in records],
        bid=[r.bid for r in records],
        count=[r.count for r in records],
        advertiser_ids=advertiser_ids,
        keyword_ids=keyword_ids,
    )
    logger.info(
        f"Loaded {log.n_records} bid records: {log.n_advertisers} advertisers, "
        f"{log.n_keywords} keywords, days {log.days}."
    )
    return log


def build_keyword_model(log: BidLog, day: int) -> KeywordModel:
    """
    Constant-bid keyword model for one day of `log`.

    Keywords are the ones with records on `day`, weighted by their total auction count. Advertisers are every
    advertiser in the log, so models of different days share campaign indexes. An advertiser's bid on a keyword is
    the count-weighted mean of its bids on it that day.
    """
    if len(log) == 0:
        raise EmptySampleError("bid log")
    mask = log.day == day
    if not mask.any():
        raise DayNotFoundError(day)

    keyword = log.keyword[mask]
    advertiser = log.advertiser[mask]
    count = log.count[mask].astype(np.float64)
    present = np.unique(keyword)
    local = np.searchsorted(present, keyword)
    W, K = present.shape[0], log.n_advertisers

    totals = np.bincount(local, weights=count, minlength=W)
    bid_sums = np.zeros((W, K))
    weights = np.zeros((W, K))
    np.add.at(bid_sums, (local, advertiser), log.bid[mask] * count)
    np.add.at(weights, (local, advertiser), count)
    bids = np.divide(bid_sums, weights, out=np.zeros_like(bid_sums), where=weights > 0)

    return KeywordModel(
        day=day,
        frequencies=totals / totals.sum(),
        bids=bids,
        keyword_ids=[log.keyword_ids[k] for k in present],
        advertiser_ids=list(log.advertiser_ids),
    )


def sample_event_stream(model: KeywordModel, N: int, seed: int) -> EventStream:
    """N independent keyword draws by frequency; each payload is the keyword's row in `model.bids`."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}.")
    if model.n_keywords == 0:
        raise EmptySampleError("keyword model")
    rng = np.random.Generator(np.random.PCG64(seed))
    keywords = rng.choice(model.n_keywords, size=N, p=model.frequencies)
    return EventStream(kind=PayloadKind.KEYWORD, payloads=keywords)


def keyword_first_price_rule(model: KeywordModel) -> FirstPriceRule:
    """First-price rule over the model's constant bids; a keyword without active bidders spends nothing."""
    if model.n_keywords == 0:
        raise EmptySampleError("keyword model")
    return FirstPriceRule(KeywordBids(model.bids))


def write_keyword_model(model: KeywordModel, path: Union[str, Path]):
    Path(path).write_text(model.json(), encoding="utf-8")


def read_keyword_model(path: Union[str, Path]) -> KeywordModel:
    return KeywordModel.parse_file(path)


def manifest_path(csv_path: Union[str, Path]) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(f"{csv_path.stem}.manifest.json")


def generate_bid_log_fixture(
    path: Union[str, Path],
    n_keywords: int = 1000,
    n_advertisers: int = 50,
    days: Sequence[int] = (1, 2),
    max_bidders: int = 8,
    seed: int = 0,
) -> BidLogManifest:
    """
    Write a synthetic bid log in the documented CSV schema plus a JSON manifest of its exact contents.

    Keyword popularity decays as a power of the keyword rank. Each keyword draws a fixed set of bidders, always
    including advertiser `(j mod n_advertisers) + 1` for keyword j so every advertiser appears. Bids are an
    advertiser level times a keyword level with day-to-day jitter, rounded to cents; each (day, keyword,
    advertiser) gets one or two records.
    """
    if n_keywords < 1 or n_advertisers < 1 or not days:
        raise ValueError("A fixture needs at least one keyword, one advertiser and one day.")
    rng = np.random.Generator(np.random.PCG64(seed))
    advertiser_level = rng.lognormal(0.0, 0.5, n_advertisers)
    keyword_level = rng.lognormal(0.0, 0.3, n_keywords)
    popularity = (np.arange(1, n_keywords + 1)) ** -0.8
    bidders = []
    for j in range(n_keywords):
        size = min(int(rng.integers(0, max_bidders)), n_advertisers)
        extra = rng.choice(n_advertisers, size=size, replace=False)
        bidders.append(sorted({j % n_advertisers, *extra.tolist()}))

    rows = []
    keyword_counts = {}
    for day in days:
        per_day = keyword_counts.setdefault(int(day), {})
        for j in range(n_keywords):
            for a in bidders[j]:
                for _ in range(rng.integers(1, 3)):
                    bid = advertiser_level[a] * keyword_level[j] * rng.lognormal(0.0, 0.1)
                    count = 1 + int(rng.poisson(100 * popularity[j]))
                    rows.append(
                        {
                            "day": int(day),
                            "advertiser_id": str(a + 1),
                            "keyword_id": str(j + 1),
                            "bid": f"{max(round(bid, 2), 0.01):.2f}",
                            "count": count,
                        }
                    )
                    per_day[str(j + 1)] = per_day.get(str(j + 1), 0) + count

    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = DictWriter(file, fieldnames=_FIELDNAMES)
        writer.writeheader()
        writer.writerows(rows)

    manifest = BidLogManifest(
        n_records=len(rows),
        days=sorted(int(d) for d in days),
        n_advertisers=len({a for b in bidders for a in b}),
        n_keywords=n_keywords,
        keyword_counts=keyword_counts,
        seed=seed,
    )
    manifest_path(path).write_text(manifest.json(indent=2), encoding="utf-8")
    logger.info(f"Wrote bid-log fixture with {len(rows)} records to {path}.")
    return manifest
