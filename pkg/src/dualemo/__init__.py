"""Publisher, social and gap emotion features for fake news detection."""

__version__ = "0.1.0"

from .resources import ResourceBundle, ResourceError, load_fixture, load_resources  # noqa: E402
from .textproc import tokenize  # noqa: E402
from .features import (  # noqa: E402
    ClassifierAdapter, DualEmotionVector, FeatureConfig, dual_emotion_features, publisher_emotion,
    social_emotion, word_emotion_score,
)
from .dataset import Dataset, NewsPiece, deduplicate, load_dataset, random_split, temporal_split  # noqa: E402
from .analysis import chi_square, contingency_table, dual_emotion_category  # noqa: E402
from .classifier import build_mlp, gradient_check, load_model, predict, save_model, train  # noqa: E402
from .metrics import metrics  # noqa: E402

__all__ = [
    "ClassifierAdapter", "Dataset", "DualEmotionVector", "FeatureConfig", "NewsPiece", "ResourceBundle",
    "ResourceError", "build_mlp", "chi_square", "contingency_table", "deduplicate", "dual_emotion_category",
    "dual_emotion_features", "gradient_check", "load_dataset", "load_fixture", "load_model", "load_resources",
    "metrics", "predict", "publisher_emotion", "random_split", "save_model", "social_emotion",
    "temporal_split", "tokenize", "train", "word_emotion_score",
]
