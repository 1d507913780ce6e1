"""eotrack: single-object tracking for 3D point clouds.

A heuristic detector (ground-plane RANSAC, DBSCAN clustering, PCA bounding-box
feature matching) feeds a Gaussian-process star-convex extended-object tracker
with an iterated EKF, validated end to end on a built-in synthetic sensor
simulator.
"""

from .pointcloud import PointCloudFrame, load_frame, save_frame, voxel_downsample
from .ground import (
    PlaneModel,
    RansacConfig,
    normalize_plane,
    point_plane_distance,
    preselect_near_plane,
    ransac_plane,
    remove_ground_points,
)
from .detector import (
    DbscanConfig,
    Detection,
    DetectionConfig,
    OperationArea,
    crop_to_operation_area,
    dbscan,
    detect_target,
    detection_cost,
    extract_features,
    pca_bounding_box,
)
from .gp import GpConfig, gp_kernel, gp_regressor
from .tracker import (
    GpTracker,
    MotionConfig,
    TargetState,
    iekf_update,
    initialize_state,
    measurement_model,
    predict,
    project_to_tracking_plane,
)
from .sim import Scenario, SensorProfile, generate_scenario
from .metrics import evaluate_detection, evaluate_tracking

__version__ = "0.1.0"
