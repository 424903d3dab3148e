"""Signal input, run documents and plot traces."""

from chebproto.records.document import (
    ClusterRecord,
    InputFingerprint,
    RunDocument,
    cluster_record,
    verify_document,
)
from chebproto.records.ingest import ingest_csv
from chebproto.records.trace import write_trace

__all__ = [
    "ClusterRecord",
    "InputFingerprint",
    "RunDocument",
    "cluster_record",
    "ingest_csv",
    "verify_document",
    "write_trace",
]
