"""From a table of published confidence intervals to a z-value histogram."""
from pathlib import Path
import tempfile

from sigfilter.ztool import histogram, ingest_csv, to_csv, write_zrecords_csv

here = Path(__file__).resolve().parent
result = ingest_csv(here.parent / "tests" / "data" / "ci_fixture.csv")
print(f"{len(result.records)} intervals converted, {len(result.rejects)} rejected")
for line, reason in result.rejects:
    print(f"  line {line}: {reason}")

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "z.csv"
    write_zrecords_csv(result.records, out)
    print(out.read_text().splitlines()[:4])

hist = histogram(result.records, "absolute", 0.5, (0.0, 5.0))
print(to_csv(hist))
