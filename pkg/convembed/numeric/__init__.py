from convembed.numeric.tape import Node, Tape, gradient_of
from convembed.numeric.gradcheck import GradCheckReport, finite_diff_check
