"""Channel/parameter factories shared by the tests."""
import numpy as np

from relaymon.channel import ChannelRealization, SystemParams, Topology, distances, sample_fading
from relaymon.experiment import ExperimentConfig, dbm_to_w

N0_REF = ExperimentConfig().noise_w
FSPL_1KM = ExperimentConfig().ref_gain


def make_channel(h1=1.0, h2=1.0, h3=1.0, H4=1.0, h5=1.0, h6=1.0, d=(1, 1, 1, 1, 1, 1)):
    vec = lambda x: np.atleast_1d(np.asarray(x, dtype=complex))
    H4 = np.asarray(H4, dtype=complex)
    if H4.ndim < 2:
        H4 = H4.reshape(1, 1)
    return ChannelRealization(vec(h1), complex(h2), vec(h3), H4, vec(h5), vec(h6), tuple(float(x) for x in d))


def unit_params(**kw):
    base = dict(ps_w=1.0, pr_w=1.0, p_max_w=1.0, n0_w=1.0, tau=3.0, n_relay=1, m_monitor=1)
    base.update(kw)
    return SystemParams(**base)


def random_instance(rng, n=4, m=4, p_dbm=None):
    """Reference powers and path loss with a random monitor position and budget."""
    if p_dbm is None:
        p_dbm = rng.uniform(-10.0, 60.0)
    params = SystemParams(dbm_to_w(40.0), dbm_to_w(40.0), dbm_to_w(p_dbm), N0_REF, 3.0, n, m, FSPL_1KM)
    topo = Topology().with_monitor(rng.uniform(-1.0, 5.0), rng.uniform(0.5, 5.0))
    return sample_fading(params, rng, distances(topo)), params
