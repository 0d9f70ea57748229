# Copyright 2026 The fairkm Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Fair k-means clustering: fairlets, fair assignment, fair coresets."""

from ._fairkm import (
    BalanceError,
    Dataset,
    DomainError,
    FairClustering,
    FairCoreset,
    GuardError,
    InfeasibleError,
    SketchState,
    SolveResult,
    StreamingCoresetBuilder,
    UnsupportedError,
    brute_force_opt,
    build_fair_coreset,
    cklv_kmeanspp,
    fair_assignment,
    fair_kmeanspp,
    fairlet_cost,
    fairlet_representatives,
    ingest_csv,
    is_fair,
    kmeans_cost,
    kmeanspp,
    merge,
    ptas,
    reassigned_cklv,
    recompress,
    recover_centers,
    run_experiment,
    synthetic_mixture,
    verify_coreset,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
