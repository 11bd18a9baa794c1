"""Edge-effect study on simulated patterns (slow)."""
import pytest

from vorproc.harness import edge_study

pytestmark = pytest.mark.slow


def test_volume_processes_differ_only_in_boundary_layer():
    st = edge_study(["alpha=-1", "alpha=0", "alpha=0.5"], replicates=6, seed=1)
    s = st.summary()
    assert s["depth_significant"] and s["selection_significant"]
    assert s["depth_classes_differing"] == [1]


def test_anti_few_and_anti_many_reach_depth_two():
    st = edge_study(["vanilla", "anti-few", "anti-many"], replicates=6, seed=1)
    s = st.summary()
    assert s["depth_significant"]
    assert set(s["depth_classes_differing"]) <= {1, 2} and 1 in s["depth_classes_differing"]
    assert st.contrast_p[3] > 0.05
