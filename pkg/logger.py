import os
from datetime import datetime, timezone

import pandas as pd

import config

COLUMNS = ["timestamp", "job", "spec_hash", "analysis", "status", "seconds", "detail"]


def log_entry(job_name, spec_hash, analysis, status, seconds, detail=""):
    return {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "job": job_name,
        "spec_hash": spec_hash,
        "analysis": analysis,
        "status": status,
        "seconds": round(float(seconds), 6),
        "detail": detail,
    }


def append_entries(entries, path=None):
    """Append rows to the run log in one read/write; the caller owns the file."""
    if not entries:
        return
    path = path or config.LOG_PATH
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)

    if os.path.exists(path) and os.path.getsize(path) > 0:
        df = pd.read_csv(path)
        df = pd.concat([df, pd.DataFrame(entries)], ignore_index=True)
    else:
        df = pd.DataFrame(entries, columns=COLUMNS)

    df.to_csv(path, index=False)


def log_event(job_name, spec_hash, analysis, status, seconds, detail="", path=None):
    append_entries([log_entry(job_name, spec_hash, analysis, status, seconds, detail)], path)


def read_log(path=None):
    """Load the run log, or an empty frame when nothing has been logged yet."""
    path = path or config.LOG_PATH
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        return pd.DataFrame(columns=COLUMNS)
    return pd.read_csv(path)
