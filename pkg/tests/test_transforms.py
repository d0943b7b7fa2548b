import json

import numpy as np
import pytest

from framethresh.core import ExplicitFrame, FrameError
from framethresh.shrink import shrink_value
from framethresh.transforms import (CDF97, D4, HAAR, CycleSpinFrame, SineFrame,
                                    TIWaveletFrame, WaveletBasis, _dwt_raw,
                                    _idwt_raw, cs_distinct_count,
                                    cycle_spin_denoise_loop, frame_from_spec,
                                    get_filters)

SQ2 = np.sqrt(2.0)


# --- filter pairs -------------------------------------------------------------

@pytest.mark.parametrize("filt,min_len", [(HAAR, 2), (D4, 4), (CDF97, 10)])
def test_one_level_perfect_reconstruction_even_lengths(filt, min_len, rng):
    for n in range(min_len, min_len + 12, 2):
        x = rng.standard_normal(n)
        details, approx = _dwt_raw(x, filt, 1)
        rec = _idwt_raw(details, approx, filt)
        assert np.max(np.abs(rec - x)) < 1e-10


# --- decimated transform --------------------------------------------------------

def test_haar_n2_constant_signal():
    wb = WaveletBasis(2, "haar")
    cv = wb.analyze(np.array([1.0, 1.0]))
    assert cv.values[0] == pytest.approx(0.0, abs=1e-14)      # detail dies
    assert cv.carry[0] == pytest.approx(SQ2, abs=1e-14)       # scaling sqrt(2)


def test_haar_n4_matches_dense_matrix_oracle():
    wb = WaveletBasis(4, "haar")
    # rows: scale-0 wavelet, scale-1 wavelets; all unit norm
    H = np.array([
        [0.5, 0.5, -0.5, -0.5],
        [1 / SQ2, -1 / SQ2, 0.0, 0.0],
        [0.0, 0.0, 1 / SQ2, -1 / SQ2],
    ])
    x = np.array([1.0, 0.0, 0.0, 0.0])
    cv = wb.analyze(x)
    assert np.allclose(np.abs(cv.values), np.abs(H @ x), atol=1e-12)
    # scaling coefficient: <const/2, x>
    assert cv.carry[0] == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("name", ["haar", "d4", "cdf97"])
def test_forward_inverse_identity(name, rng):
    wb = WaveletBasis(64, name)
    x = rng.standard_normal(64)
    rec = wb.dual_synthesize(wb.analyze(x))
    assert np.max(np.abs(rec - x)) < 1e-10


def test_non_power_of_two_rejected():
    with pytest.raises(FrameError):
        WaveletBasis(48, "haar")


def test_atom_counts_and_labels():
    wb = WaveletBasis(32, "haar", coarsest_level=2)
    assert wb.atom_count == 32 - 4
    assert wb.carry_dim == 4
    js = wb.label_arrays()[0]
    assert js.min() == 2 and js.max() == 4


def test_wavelet_atoms_unit_norm_all_scales():
    for name in ("haar", "d4", "cdf97"):
        wb = WaveletBasis(64, name)
        for pos in range(wb.atom_count):
            assert abs(np.linalg.norm(wb.atom(pos)) - 1.0) < 1e-10


# --- cycle spinning --------------------------------------------------------------

def test_cs_m1_equals_basis(rng):
    wb = WaveletBasis(32, "haar")
    cs = CycleSpinFrame(32, 1, "haar")
    x = rng.standard_normal(32)
    assert np.allclose(cs.analyze(x).values, wb.analyze(x).values, atol=1e-13)


@pytest.mark.parametrize("filters", ["haar", "d4"])
@pytest.mark.parametrize("M", [2, 4, 8])
def test_cs_energy_identity_on_wavelet_subspace(filters, M, rng):
    frame = CycleSpinFrame(64, M, filters)
    scaling = frame.basis.scaling_atom(0)
    u = rng.standard_normal(64)
    u -= (scaling @ u) * scaling  # wavelet-subspace component
    energy = float(np.sum(frame.analyze(u).values ** 2))
    assert energy == pytest.approx(M * float(u @ u), rel=1e-12)


def test_cs_rejects_biorthogonal_and_bad_M():
    with pytest.raises(FrameError):
        CycleSpinFrame(32, 2, "cdf97")
    with pytest.raises(FrameError):
        CycleSpinFrame(32, 3, "haar")
    with pytest.raises(FrameError):
        CycleSpinFrame(32, 64, "haar")


def test_est_cs_loop_equals_frame_pipeline(rng):
    basis = WaveletBasis(64, "haar")
    data = rng.standard_normal(64) + np.repeat(rng.uniform(-2, 2, 8), 8)
    for M in (2, 4):
        frame = CycleSpinFrame(basis, M)
        cv = frame.analyze(data)
        shrunk = cv.replace_values(shrink_value(cv.values, 0.7, "soft"))
        pipeline = frame.dual_synthesize(shrunk)
        loop = cycle_spin_denoise_loop(basis, data, 0.7,
                                       lambda v, T: shrink_value(v, T, "soft"), M)
        assert np.max(np.abs(pipeline - loop)) < 1e-10


def test_cs_distinct_count_examples():
    assert cs_distinct_count(8, 1) == 7
    assert cs_distinct_count(8, 2) == 14
    assert cs_distinct_count(1024, 1024) == 10240  # n log2 n


def test_cs_distinct_count_matches_enumeration():
    for n in (8, 16, 32):
        M = 2
        while M <= n:
            frame = CycleSpinFrame(n, M, "haar")
            atoms = {frame.atom(p).round(12).tobytes()
                     for p in range(frame.atom_count)}
            assert len(atoms) == cs_distinct_count(n, M)
            # no duplicates yet at M=2 (count = M(n-1)); strictly fewer beyond
            if M >= 4:
                assert cs_distinct_count(n, M) < M * (n - 1)
            else:
                assert cs_distinct_count(n, M) == M * (n - 1)
            M *= 2


def test_cs_distinct_count_rejects_M_above_n():
    with pytest.raises(FrameError):
        cs_distinct_count(8, 16)


# --- translation invariant --------------------------------------------------------

def test_ti_agrees_with_cs_full_shift(rng):
    n = 32
    ti = TIWaveletFrame(n, "haar")
    cs = CycleSpinFrame(n, n, "haar")
    x = rng.standard_normal(n)
    cti = ti.analyze(x)
    ccs = cs.analyze(x)
    lookup = {(int(j), int(s)): v for j, s, v in
              zip(cti.labels[0], cti.labels[1], cti.values)}
    bj, bk, bm = ccs.labels
    for pos in range(ccs.count):
        j, k, m = int(bj[pos]), int(bk[pos]), int(bm[pos])
        s = (m + k * (n >> j)) % n
        assert ccs.values[pos] == pytest.approx(lookup[(j, s)], abs=1e-10)


def test_ti_constant_signal_zero_details():
    ti = TIWaveletFrame(64, "haar")
    cv = ti.analyze(np.full(64, 3.7))
    assert np.max(np.abs(cv.values)) < 1e-12


def test_ti_shift_equivariance():
    ti = TIWaveletFrame(32, "haar")
    spike_a = np.zeros(32); spike_a[5] = 1.0
    spike_b = np.zeros(32); spike_b[6] = 1.0
    ca = ti.analyze(spike_a).values.reshape(ti.levels, 32)
    cb = ti.analyze(spike_b).values.reshape(ti.levels, 32)
    assert np.max(np.abs(np.roll(ca, 1, axis=1) - cb)) < 1e-12


def test_ti_distinct_count():
    ti = TIWaveletFrame(64, "haar")
    assert ti.atom_count == 64 * 6  # n log2 n
    assert ti.distinct_count == ti.atom_count


def test_ti_multiplicities():
    ti = TIWaveletFrame(16, "haar")
    js = ti._labels[0]
    for pos in (0, 16, 32, 48):
        assert ti.atom_multiplicity(pos) == 2.0 ** int(js[pos])


# --- sine frames ------------------------------------------------------------------

def test_sine_basis_gram_identity():
    sf = SineFrame(64, 1)
    atoms = np.stack([sf.atom(p) for p in range(sf.atom_count)])
    gram = atoms @ atoms.T
    assert np.max(np.abs(gram - np.eye(sf.atom_count))) < 1e-9


def test_sine_excludes_zero_frequency_atom():
    for r in (1, 2):
        sf = SineFrame(1024, r)
        assert sf.excluded == [1024.0]
        assert sf.atom_count == r * 1024 - 1


def test_sine_on_grid_signal_two_dominant_coefficients():
    n = 1024
    k = np.arange(n)
    amp = 5 * np.sqrt(2) / 16
    u = amp * np.sin(np.pi * 150 * k / n) + amp * np.sin(np.pi * 380 * k / n)
    sf = SineFrame(n, 1)
    vals = np.abs(sf.analyze(u).values)
    top = np.argsort(vals)[-2:]
    freqs = sorted(sf.frequency_of(p) for p in top)
    assert freqs == [150.0, 380.0]
    assert vals[top].min() > 20 * np.partition(vals, -3)[-3]


def test_sine_off_grid_frequency_appears_at_half_integer():
    n = 1024
    k = np.arange(n)
    u = np.sin(np.pi * 150.5 * k / n)
    sf = SineFrame(n, 2)
    vals = np.abs(sf.analyze(u).values)
    assert sf.frequency_of(int(np.argmax(vals))) == 150.5


def test_sine_analyze_matches_brute_force(rng):
    sf = SineFrame(64, 2)
    x = rng.standard_normal(64)
    brute = np.array([sf.atom(p) @ x for p in range(sf.atom_count)])
    assert np.allclose(sf.analyze(x).values, brute, atol=1e-12)


# --- JSON frame specs --------------------------------------------------------------

def test_frame_from_spec_roundtrip(tmp_path):
    specs = [
        {"type": "wavelet", "n": 32, "filters": "d4"},
        {"type": "cyclespin", "n": 32, "M": 4},
        {"type": "ti", "n": 32},
        {"type": "sine", "n": 32, "oversample": 2},
    ]
    for spec in specs:
        frame = frame_from_spec(json.dumps(spec))
        assert frame.n == 32
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(specs[0]))
    assert frame_from_spec(str(path)).name.startswith("wavelet[d4")


def test_frame_from_spec_explicit(tmp_path, rng):
    mat = rng.standard_normal((12, 8))
    mpath = tmp_path / "atoms.csv"
    np.savetxt(mpath, mat, delimiter=",")
    frame = frame_from_spec({"type": "explicit", "matrix_path": str(mpath)})
    assert isinstance(frame, ExplicitFrame)
    assert frame.atom_count == 12 and frame.n == 8


def test_frame_from_spec_unknown_type():
    with pytest.raises(FrameError):
        frame_from_spec({"type": "curvelet", "n": 32})


def test_get_filters_unknown():
    with pytest.raises(FrameError):
        get_filters("sym8")
