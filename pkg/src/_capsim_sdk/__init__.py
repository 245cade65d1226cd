# SPDX-FileCopyrightText: 2024-present capsim developers
#
# SPDX-License-Identifier: MIT
