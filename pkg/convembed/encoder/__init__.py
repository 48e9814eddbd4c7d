from convembed.encoder.config import EncoderConfig
from convembed.encoder.params import EncoderParams, init_params, parameter_shapes
from convembed.encoder.sectioning import SectionGrid, section_conversation
from convembed.encoder.layers import attend, bigru_encode, gru_cell
from convembed.encoder.encoder import (
    AttentionTrace,
    BatchEncoding,
    ConversationEncoder,
    Embedding,
    encode_conversation,
)
