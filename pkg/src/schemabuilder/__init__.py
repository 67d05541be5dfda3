"""schemabuilder: semi-automatic classification schema construction.

Pipeline: ingest a document corpus, build an n-gram index and a TF-IDF
feature matrix, cluster it into a coded typology, edit the typology into a
category schema through logged operations, then generate and evaluate
n-gram classification rules against the corpus.
"""

__version__ = "0.1.0"
