"""seqlab: Vietnamese sequence labeling (POS, chunking, NER).

Char-CNN + BiLSTM + CRF taggers over pre-trained word embeddings, staged
into a POS -> chunk -> NER pipeline, with CoNLL data handling, span-F1
evaluation, a training loop, a CLI and an HTTP annotation service.
"""

__version__ = "0.1.0"
