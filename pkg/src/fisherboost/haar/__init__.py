from fisherboost.haar.features import HaarFeature, HaarType, corner_matrix, enumerate_features, feature_matrix, feature_value
from fisherboost.haar.integral import integral, rect_sum
from fisherboost.haar.space import FeatureSpace, SampledDesign, globalize, sampled_design
