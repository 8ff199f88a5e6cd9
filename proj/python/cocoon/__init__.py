"""Semantic table profiling: statistics, LLM-routed semantics and review."""

from ._core import (
    AlreadyFinalized,
    CocoonError,
    ConfigError,
    ConflictError,
    EditRejected,
    IoError,
    KindNotApplicable,
    NothingToExport,
    QueryBindError,
    QuerySyntaxError,
    Session,
    Table,
    UnknownColumn,
    UnknownStep,
    __version__,
    induce_regex,
    normalize_query,
    quantiles,
)


def profile(path, mock_script=None, transcript=None, docs=None, until=None):
    """Load a CSV, run the pipeline and return (session, export document)."""
    session = Session(Table.load(path), mock_script=mock_script, transcript=transcript, docs=docs)
    session.run(until)
    return session, session.export()


__all__ = [
    "AlreadyFinalized",
    "CocoonError",
    "ConfigError",
    "ConflictError",
    "EditRejected",
    "IoError",
    "KindNotApplicable",
    "NothingToExport",
    "QueryBindError",
    "QuerySyntaxError",
    "Session",
    "Table",
    "UnknownColumn",
    "UnknownStep",
    "__version__",
    "induce_regex",
    "normalize_query",
    "profile",
    "quantiles",
]
