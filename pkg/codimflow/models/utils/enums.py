from enum import Enum



class FlowFamily(str, Enum):
    """Sets the possible values of the AnalyticFlow.family attribute."""
    SPHERE = "sphere"
    PLANE = "plane"
    CYLINDER = "cylinder"


class ShapeKind(str, Enum):
    """Sets the possible values of the shape.kind attribute of a config."""
    POINT = "point"
    SPHERE = "sphere"
    SPHERES = "spheres"
    PLANE = "plane"
    CYLINDER = "cylinder"
    SEGMENT = "segment"
    KOCH = "koch"
    CLOUD = "cloud"


class BoundaryMode(str, Enum):
    """Sets the possible values of the GraphField.boundary attribute."""
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"


class EnvelopeEnd(str, Enum):
    """Sets which end of the degenerate envelope a scheme uses at small
    gradients."""
    LOWER = "lower"
    UPPER = "upper"



class VerifyCheck(str, Enum):
    """Sets the possible values of the verify --check option."""
    TUBE = "tube"
    PDE = "pde"
    SUBSOLUTION = "subsolution"
    ALPHA = "alpha"
    AVOIDANCE = "avoidance"
    CONTRACTION = "contraction"
    SANDWICH = "sandwich"
    EXTENSION = "extension"
    OPERATOR = "operator"


class VerifyFamily(str, Enum):
    """Sets the possible values of the verify --family option."""
    CIRCLE = "circle"
    SPHERE = "sphere"
    PLANE = "plane"
    CYLINDER = "cylinder"
    CIRCLE3D = "circle3d"


class GraphExperiment(str, Enum):
    """Sets the possible values of the graphflow experiment attribute."""
    SMALL_DATA = "small_data"
    LADDER = "ladder"
    INTERPOLATION = "interpolation"
    LINEARIZATION = "linearization"
    EXTENSION = "extension"


class Experiment(str, Enum):
    """Sets the possible values of the ExperimentSpec.name attribute."""
    FLOW = "flow"
    GRAPHFLOW = "graphflow"
    REIFENBERG = "reifenberg"
    VERIFY = "verify"
    MULTISCALE = "multiscale"
    GEN = "gen"
