# SPDX-FileCopyrightText: 2024-present capsim developers
#
# SPDX-License-Identifier: MIT
__version__ = "0.1.0"
