#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for field, trajectory, report and cutoff files.
"""

import os
import sys

import numpy as np
import pytest

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.core.commutator_lab import SuiteParams, ratio_suite
from src.core.errors import InvalidFieldError
from src.core.integrator import StepperConfig, random_initial_data, simulate
from src.core.model import ModelParams, build_cutoff
from src.core.spectral_field import SpectralField, random_field
from src.utils.serialization import (
    read_cutoff,
    read_field_binary,
    read_field_csv,
    read_json,
    read_report_samples,
    write_cutoff,
    write_field_binary,
    write_field_csv,
    write_report,
    write_trajectory,
)


@pytest.mark.parametrize("K", [0, 1, 7])
def test_field_files_are_lossless(tmp_path, K):
    field = random_field(K, -1.0, np.random.default_rng(K))
    csv_path = str(tmp_path / "field.csv")
    bin_path = str(tmp_path / "field.bin")
    write_field_csv(csv_path, field)
    write_field_binary(bin_path, field)
    assert np.array_equal(read_field_csv(csv_path).coefficients, field.coefficients)
    assert np.array_equal(read_field_binary(bin_path).coefficients, field.coefficients)


def test_field_csv_layout(tmp_path):
    path = tmp_path / "field.csv"
    write_field_csv(str(path), SpectralField.from_modes(1, {1: 0.5}))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# spectral-field v1 K=1"
    assert lines[1] == "k,re,im"
    assert lines[-1].startswith("1,0.5,")


def test_bad_field_files_are_rejected(tmp_path):
    path = tmp_path / "field.csv"
    path.write_text("k,re,im\n0,1,0\n", encoding="utf-8")
    with pytest.raises(InvalidFieldError):
        read_field_csv(str(path))

    path.write_text("# spectral-field v1 K=2\nk,re,im\n0,1,0\n", encoding="utf-8")
    with pytest.raises(InvalidFieldError):
        read_field_csv(str(path))

    binary = tmp_path / "field.bin"
    binary.write_bytes(b"spectral-field v1 K=1\n" + np.zeros(2, dtype="<c16").tobytes())
    with pytest.raises(InvalidFieldError):
        read_field_binary(str(binary))


def test_trajectory_files(tmp_path):
    params = ModelParams(cutoff=build_cutoff(1.0, 4.0, 0.5, max_wavenumber=16))
    v0 = random_initial_data(8, 3.0, np.random.default_rng(0))
    record = simulate(v0, params, StepperConfig(t_end=0.05))
    csv_path = write_trajectory(str(tmp_path), "run", record, {"seed": 0, "scheme": "lawson_rk4"})
    lines = open(csv_path, encoding="utf-8").read().splitlines()
    assert lines[0] == ",".join(record.header)
    assert len(lines) == len(record.times) + 1
    sidecar = read_json(str(tmp_path / "run.json"))
    assert sidecar["termination"] == "completed"
    assert sidecar["samples"] == len(record.times)
    assert sidecar["seed"] == 0


def test_report_files(tmp_path):
    report = ratio_suite("L3.4", SuiteParams(alpha=0.5, r=2.0), ensemble=2, seed=0, resolutions=(8, 16))
    csv_path = write_report(str(tmp_path), "L3.4", report)
    lines = open(csv_path, encoding="utf-8").read().splitlines()
    assert lines[0] == "K,max_ratio,high_max,low_max"
    assert lines[1].startswith("8,")
    assert read_json(str(tmp_path / "L3.4.json"))["lemma"] == "L3.4"

    samples_path = tmp_path / "L3.4_samples.csv"
    assert samples_path.read_text(encoding="utf-8").splitlines()[0] == "K,sample,ratio"
    samples = read_report_samples(str(samples_path))
    assert sorted(samples) == [8, 16]
    for K, ratios in report.samples.items():
        assert np.array_equal(samples[K], ratios)


def test_cutoff_round_trip(tmp_path):
    cutoff = build_cutoff(1.0, 4.0, 0.5, max_wavenumber=32, amplitude=2.0)
    path = str(tmp_path / "cutoff.json")
    write_cutoff(path, cutoff)
    loaded = read_cutoff(path)
    assert loaded.field.allclose(cutoff.field, rtol=0.0, atol=0.0)
    assert (loaded.a, loaded.b, loaded.delta, loaded.amplitude) == (1.0, 4.0, 0.5, 2.0)
    assert read_json(path)["K"] == 32
