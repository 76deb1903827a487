import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

REPO = Path(__file__).resolve().parents[1]
DEMO_CONFIGS = REPO / "demos" / "configs"
