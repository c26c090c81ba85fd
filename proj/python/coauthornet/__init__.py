"""Co-authorship recommendation from citation-graph embeddings."""

from ._coauthornet import (
    Graph,
    RunConfig,
    auc_roc,
    bce_loss,
    compute_metrics,
    embed,
    evaluate,
    gen_synthetic,
    generate_sbm,
    generate_walks,
    gradcheck,
    ingest,
    link_embed,
    normalize_author_name,
    parse_paper_metadata,
    recommend,
    split_edges,
    train,
)

__all__ = [
    "Graph",
    "RunConfig",
    "auc_roc",
    "bce_loss",
    "compute_metrics",
    "embed",
    "evaluate",
    "gen_synthetic",
    "generate_sbm",
    "generate_walks",
    "gradcheck",
    "ingest",
    "link_embed",
    "normalize_author_name",
    "parse_paper_metadata",
    "recommend",
    "split_edges",
    "train",
]
