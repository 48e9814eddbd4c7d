from convembed.corpus.models import Conversation, Corpus, TurnRecord
from convembed.corpus.io import load_corpus, save_corpus
from convembed.corpus.normalize import NormalizationMode, normalize_per_speaker
from convembed.corpus.selection import Selection, SelectionSpec, select_extremes
from convembed.corpus.synthetic import SynthSpec, generate_synthetic, signal_direction
