from fisherboost.data.dataset import ClassVector, Dataset, MarginVector, ResponseMatrix, margins, order_by_label
from fisherboost.data.io import load_dataset, save_dataset
from fisherboost.data.synthetic import NodeStreamRow, gen_asymmetric, gen_node_stream, gen_toy_2d, write_node_stream
