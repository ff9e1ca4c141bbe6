"""simhaystack: perceptual image similarity algorithms and their benchmark.

Three method families behind one thresholded matcher - block perceptual
hashes, ORB-style binary keypoint features, and deep-embedding distances -
plus the seeded evaluation protocol that scores them: a 58-attack
perturbation suite, experimental/control splits, threshold-swept ROC/AUC,
database-size scaling and template matching.
"""

from .blockhash import SegmentedHash, ahash, crop_resistant_hash, dhash, phash, segmented_match, whash
from .embeddist import Embedding, distance, load_embeddings, write_embeddings
from .hashbits import BitHash, ber, hamming
from .keypoints import FeatureSet, Keypoint, brief_describe, extract_features, fast_detect, image_match
from .matching import (
    BlockHashEncoder,
    Database,
    EmbeddingLookupEncoder,
    Fingerprint,
    OrbEncoder,
    RandomHashEncoder,
    ThresholdMatcher,
    best_match,
    make_backend,
)
from .perturb import PerturbationSpec, apply, generate_suite

__version__ = "0.1.0"

__all__ = [
    "BitHash",
    "hamming",
    "ber",
    "ahash",
    "phash",
    "dhash",
    "whash",
    "crop_resistant_hash",
    "SegmentedHash",
    "segmented_match",
    "Keypoint",
    "FeatureSet",
    "fast_detect",
    "brief_describe",
    "extract_features",
    "image_match",
    "Embedding",
    "distance",
    "load_embeddings",
    "write_embeddings",
    "PerturbationSpec",
    "apply",
    "generate_suite",
    "Fingerprint",
    "Database",
    "best_match",
    "make_backend",
    "BlockHashEncoder",
    "OrbEncoder",
    "RandomHashEncoder",
    "EmbeddingLookupEncoder",
    "ThresholdMatcher",
    "__version__",
]
