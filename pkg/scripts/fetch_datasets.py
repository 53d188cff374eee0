"""
Download the UCI tables used by the reproduction checks into data/ as headed CSVs

    python scripts/fetch_datasets.py [--dest data]

seeds.csv            7 geometric kernel measurements, label column "variety"
breast_cancer_wisconsin.csv
                     9 cytology scores, label column "class" (missing cells left empty)
"""
import argparse
import io
import logging
import sys
from pathlib import Path

import httpx
import pandas as pd

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger("fetch_datasets")

UCI_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

SEEDS_COLUMNS = [
    "area", "perimeter", "compactness", "kernel_length", "kernel_width", "asymmetry", "groove_length", "variety",
]
WISCONSIN_COLUMNS = [
    "id", "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity", "marginal_adhesion",
    "epithelial_cell_size", "bare_nuclei", "bland_chromatin", "normal_nucleoli", "mitoses", "class",
]


def fetch_text(client: httpx.Client, url: str) -> str:
    logger.info(f"Fetching {url}")
    response = client.get(url)
    response.raise_for_status()
    return response.text


def fetch_seeds(client: httpx.Client, dest: Path) -> Path:
    text = fetch_text(client, f"{UCI_BASE}/00236/seeds_dataset.txt")
    frame = pd.read_csv(io.StringIO(text), sep=r"\s+", header=None, names=SEEDS_COLUMNS)
    path = dest / "seeds.csv"
    frame.to_csv(path, index=False)
    return path


def fetch_wisconsin(client: httpx.Client, dest: Path) -> Path:
    text = fetch_text(client, f"{UCI_BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data")
    frame = pd.read_csv(io.StringIO(text), header=None, names=WISCONSIN_COLUMNS, na_values=["?"])
    frame = frame.drop(columns=["id"])
    frame["class"] = frame["class"].map({2: "benign", 4: "malignant"})
    path = dest / "breast_cancer_wisconsin.csv"
    frame.to_csv(path, index=False)
    return path


def main() -> int:
    parser = argparse.ArgumentParser(description="Download UCI datasets for the reproduction checks")
    parser.add_argument("--dest", type=Path, default=Path("data"), help="Destination directory")
    args = parser.parse_args()

    args.dest.mkdir(parents=True, exist_ok=True)
    try:
        with httpx.Client(timeout=30.0, follow_redirects=True) as client:
            for fetch in (fetch_seeds, fetch_wisconsin):
                path = fetch(client, args.dest)
                logger.info(f"Wrote {path}")
    except httpx.HTTPError as e:
        logger.error(f"Download failed: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
