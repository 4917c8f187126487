import pytest

from seqlab.data import scheme_for_task
from seqlab.model import ArchitectureConfig
from seqlab.pipeline import PipelineBundle
from seqlab.toydata import make_toy_corpus, make_toy_embeddings
from seqlab.training import TrainConfig, train

TINY_ARCH = ArchitectureConfig(char_dim=8, window=3, filters=8, hidden=12)


@pytest.fixture(scope="session")
def tiny_bundle():
    """Three quickly-trained toy models wired into a pipeline.

    Accuracy does not matter here, only that the models are structurally
    valid and deterministic; tests about annotation quality use properly
    trained models instead.
    """
    train_set, dev_set = make_toy_corpus(42)
    emb = make_toy_embeddings(dim=32, seed=0)
    models = {}
    for task in ("pos", "chunk", "ner"):
        cfg = TrainConfig(max_epochs=3, patience=3, seed=7)
        model, _ = train(train_set, dev_set, emb, scheme_for_task(task), cfg,
                         arch=TINY_ARCH)
        models[task] = model
    return PipelineBundle(meta={"corpus": "toy", "arch": "tiny"}, **models)
