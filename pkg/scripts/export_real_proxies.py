"""Export the S&P 500 and NASDAQ Composite closes bundled with the ``arch``
package into ``date,close`` CSVs under tests/data/real/.

Usage: python scripts/export_real_proxies.py path/to/arch-*.whl

The series are daily Yahoo Finance closes, clipped to 2000-01-20 onward.
"""

import csv
import gzip
import io
import sys
import zipfile
from datetime import datetime
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "real"
START = "2000-01-20"


def main(wheel: str) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(wheel) as zf:
        for name in ("sp500", "nasdaq"):
            raw = gzip.decompress(zf.read(f"arch/data/{name}/{name}.csv.gz")).decode()
            rows = list(csv.DictReader(io.StringIO(raw)))
            with (OUT / f"{name}.csv").open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["date", "close"])
                for r in rows:
                    d = datetime.strptime(r["Date"], "%m/%d/%Y").date().isoformat()
                    if d >= START:
                        w.writerow([d, r["Close"]])


if __name__ == "__main__":
    main(sys.argv[1])
