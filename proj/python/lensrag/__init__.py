from ._core import (
    BackendUnavailable,
    ConfigError,
    DatasetError,
    Error,
    InvalidParams,
    LengthMismatch,
    Session,
    aggregate,
    chunk_spans,
    dataset_stats,
    default_config,
    fuse_scores,
    image_key,
    load_dataset,
    normalize_query,
    overlap,
    parse_html,
    parse_judge_reply,
    resized_dims,
    select,
    validate_config,
)

__all__ = [
    "BackendUnavailable",
    "ConfigError",
    "DatasetError",
    "Error",
    "InvalidParams",
    "LengthMismatch",
    "Session",
    "aggregate",
    "chunk_spans",
    "dataset_stats",
    "default_config",
    "fuse_scores",
    "image_key",
    "load_dataset",
    "normalize_query",
    "overlap",
    "parse_html",
    "parse_judge_reply",
    "resized_dims",
    "select",
    "validate_config",
]
