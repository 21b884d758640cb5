# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0
