import math

import numpy as np
import pytest

from heliosense import hydrogen1d, sensing
from heliosense.errors import InvalidParameterError


@pytest.fixture(scope="module")
def z12_sensing():
    # dipole element at the pressing field of the published estimate
    spec = hydrogen1d.solve_spectrum(hydrogen1d.default_potential(5.69e4), 2)
    return abs(hydrogen1d.dipole_elements(spec).z12)


class TestShowcasePoint:
    def test_field_and_power(self, z12_sensing):
        pt = sensing.showcase_point(detuning=1e4, z12=z12_sensing)
        assert pt.omega_12 == pytest.approx(100.0, rel=1e-12)
        assert pt.e_w == pytest.approx(1.73e-5, rel=0.05)      # 173 nV/cm
        assert pt.p_w == pytest.approx(7.9e-13, rel=0.10)      # 7.9e-17 W/cm^2

    def test_requires_dipole(self):
        with pytest.raises(InvalidParameterError):
            sensing.showcase_point(detuning=1e4)


class TestSensitivityCurve:
    def test_monotone_decreasing_field(self, z12_sensing):
        curve = sensing.sensitivity_curve(
            np.linspace(0.05, 3.0, 12), math.pi / 10, 1e4, z12_sensing
        )
        fields = [pt.e_w for pt in curve]
        assert fields == sorted(fields, reverse=True)

    def test_threshold_scaling(self, z12_sensing):
        base = sensing.sensitivity_point(1.0, 0.1, 1e4, z12_sensing)
        doubled = sensing.sensitivity_point(1.0, 0.2, 1e4, z12_sensing)
        assert doubled.e_w == pytest.approx(math.sqrt(2.0) * base.e_w, rel=1e-12)

    def test_invalid_inputs(self, z12_sensing):
        with pytest.raises(InvalidParameterError):
            sensing.sensitivity_point(0.0, 0.1, 1e4, z12_sensing)
        with pytest.raises(InvalidParameterError):
            sensing.sensitivity_point(1.0, 0.1, -1e4, z12_sensing)


class TestBenchmarks:
    def test_published_reference_rows(self):
        by_name = {b["name"]: b for b in sensing.DEFAULT_BENCHMARKS}
        assert by_name["rydberg_detector_power"]["p_min_W"] == 190e-15
        assert by_name["rydberg_detector_field"]["e_min_V_per_m"] == pytest.approx(1.32e-2)

    def test_showcase_beats_benchmarks(self, z12_sensing):
        pt = sensing.showcase_point(detuning=1e4, z12=z12_sensing)
        by_name = {b["name"]: b for b in sensing.DEFAULT_BENCHMARKS}
        assert pt.e_w < by_name["rydberg_detector_field"]["e_min_V_per_m"]
