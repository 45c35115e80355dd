"""Discords of every length in a range, found with segment-parallel range
discord searches and an adaptive distance threshold."""

from .core import (
    DiscordRecord,
    MultiLengthDiscordSet,
    SegmentLayout,
    SubseqIndex,
    TimeSeries,
    compute_layout,
    non_self_match,
    sort_records,
)
from .distance import (
    dot_products_block,
    early_abandon_sq_ed,
    pair_sq_dist,
    sq_ed,
    sq_ednorm_from_dot,
    update_dot_col,
    znormalize,
)
from .drag import brute_force_nn, brute_force_topk, drag, drag_refine, drag_select, range_discord_oracle
from .heatmap import Heatmap, build_heatmap, rank_discords
from .io import gen_randomwalk, load_series, read_discords, write_discords, write_series
from .merlin import merlin, next_threshold
from .pardrag import SelectionState, conjoin_bitmaps, par_refine, par_select, pardrag
from .stats import RollingStats, advance_stats, init_stats

__version__ = "0.1.0"
