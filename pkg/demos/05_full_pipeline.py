"""The whole pipeline through the same code path as the CLI `run` command.

Equivalent to:
    eotrack run --config <file with the dict below> --out demo_out
"""

import json
import tempfile
from pathlib import Path

from eotrack.config import pipeline_config_from_dict
from eotrack.pipeline import run_pipeline

with tempfile.TemporaryDirectory() as tmp:
    config = pipeline_config_from_dict({
        "seed": 0,
        "profile": "camera_like",
        "input": "simulate:turning",
        "out_dir": str(Path(tmp) / "run"),
        "scenario": {"duration": 5.0},
    })
    metrics = run_pipeline(config)

    print("artifacts:")
    for path in sorted(config.out_dir.iterdir()):
        print(f"  {path.name}: {path.stat().st_size} bytes")
    print("\nmetrics:")
    print(json.dumps(metrics, indent=2))
