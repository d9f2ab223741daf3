# Run every stage on the bundled 20-post fixture and look at the outputs.
"""
Equivalent to

    tim run --config <package>/data/fixture/config.toml --out-dir <dir>

    python3 demos/05_full_pipeline.py [out_dir]
"""

import json
import sys
import tempfile
from importlib import resources
from pathlib import Path

from tim.report import load_config, run_pipeline, sorted_lines

fixture = Path(str(resources.files("tim").joinpath("data/fixture")))
out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="tim-"))
result = run_pipeline(load_config(fixture / "config.toml", out_dir=str(out_dir.resolve())))

print(f"outputs in {out_dir}")
for rec in result["records"]:
    where = rec.locations[0].name if rec.locations else "-"
    print(f"  {rec.post_id} {rec.label:<12} {where:<24} region={rec.region_id} lines={sorted_lines(rec.lines)}")
print(f"{result['geojson_features']} map features, {result['skipped']} without a location")

impact = json.loads((out_dir / "impact.json").read_text(encoding="utf-8"))
print(f"passengers affected: {impact['total_passengers']} {impact['per_region']}")
for name in ("post_types.csv", "line_mentions.csv", "sentiment.csv"):
    print(f"\n{name}:")
    print("".join((out_dir / name).read_text(encoding="utf-8").splitlines(True)[:6]), end="")
