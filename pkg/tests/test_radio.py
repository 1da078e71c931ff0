import numpy as np
import pytest

from swarmform.geom import DegenerateGeometryError, Formation, Pose, Sensor, vec3
from swarmform.radio import (
    RadioParams,
    ResourceModel,
    comm_resource,
    dbm_to_watts,
    link_stats,
    received_power,
    sensor_cost,
    sinr,
    sinr_db,
    to_db,
)


def line_formation(xs):
    poses = [Pose(vec3(x, 0, 0), 0.0, Sensor.CAMERA) for x in xs]
    return Formation(poses=poses, target=np.zeros(3))


class TestUnits:
    def test_dbm_conversion(self):
        assert dbm_to_watts(-110.0) == pytest.approx(1e-14)
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)

    def test_db_round_trip(self):
        assert to_db(10.0) == pytest.approx(10.0)
        assert to_db(1.0) == pytest.approx(0.0)


class TestPower:
    def test_inverse_square_decay(self):
        rp = RadioParams()
        p1 = received_power(vec3(0, 0, 0), vec3(1, 0, 0), rp)
        p2 = received_power(vec3(0, 0, 0), vec3(2, 0, 0), rp)
        assert p1 == pytest.approx(rp.tx_power * rp.rho0)
        assert p1 / p2 == pytest.approx(4.0)

    def test_coincident_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            received_power(vec3(1, 1, 1), vec3(1, 1, 1), RadioParams())

    def test_params_validation(self):
        with pytest.raises(ValueError):
            RadioParams(alpha=0.5)
        with pytest.raises(ValueError):
            RadioParams(tx_power=0.0)


class TestSinr:
    def test_three_node_hand_computed(self):
        # members at x = 0, 1, 3; link 1 -> 0 with member 2 interfering
        rp = RadioParams()
        f = line_formation([0.0, 1.0, 3.0])
        signal = rp.tx_power * rp.rho0          # distance 1
        interference = rp.tx_power * rp.rho0 / 9.0  # distance 3
        expected = signal / (interference + rp.noise_power)
        assert sinr(1, 0, f, rp) == pytest.approx(expected)
        assert sinr_db(1, 0, f, rp) == pytest.approx(10 * np.log10(expected))

    def test_self_link_rejected(self):
        with pytest.raises(ValueError):
            sinr(1, 1, line_formation([0.0, 1.0]), RadioParams())

    def test_two_member_link_noise_limited(self):
        # no interferers: SINR = SNR
        rp = RadioParams()
        f = line_formation([0.0, 2.0])
        expected = rp.tx_power * rp.rho0 / 4.0 / rp.noise_power
        assert sinr(1, 0, f, rp) == pytest.approx(expected)

    def test_link_stats_aggregates(self):
        rp = RadioParams()
        f = line_formation([0.0, 1.0, 3.0])
        stats = link_stats(f, 0, rp)
        vals = [sinr_db(1, 0, f, rp), sinr_db(2, 0, f, rp)]
        assert stats["avg_db"] == pytest.approx(np.mean(vals))
        assert stats["min_db"] == pytest.approx(min(vals))
        assert stats["min_db"] <= stats["avg_db"]

    def test_link_stats_needs_two(self):
        with pytest.raises(ValueError):
            link_stats(line_formation([0.0]), 0, RadioParams())


class TestResources:
    def test_lidar_exceeds_camera(self):
        rm = ResourceModel()
        assert comm_resource(Sensor.LIDAR, rm) > comm_resource(Sensor.CAMERA, rm)
        assert sensor_cost(Sensor.LIDAR, rm) > sensor_cost(Sensor.CAMERA, rm)

    def test_validation(self):
        with pytest.raises(ValueError):
            ResourceModel(bandwidth_lidar=0.5)
        with pytest.raises(ValueError):
            ResourceModel(cost_lidar=0.05)
