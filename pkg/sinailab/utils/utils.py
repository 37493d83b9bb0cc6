# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

"""Utility functions."""

import contextlib
import csv
import fnmatch
import hashlib
import json
import logging
import os
import tempfile

import h5py
import numpy as np
from filelock import FileLock

__all__ = [
    "find_files",
    "read_csv",
    "write_csv",
    "read_hdf5",
    "write_hdf5",
    "atomic_open",
    "read_json",
    "write_json",
    "sha256_file",
    "content_hash",
    "register_run",
    "default_lab_dir",
]


def find_files(root_dir, query="results.json", include_root_dir=True):
    """Artifacts matching `query` anywhere below a run root, in sorted order.

    Args:
        root_dir (str): A run directory or a root holding several runs.
        query (str): fnmatch pattern of the artifact name.
        include_root_dir (bool): If False, paths are relative to root_dir.

    Returns:
        list: Matching paths.

    """
    found = [
        os.path.join(here, name)
        for here, _, names in os.walk(root_dir, followlinks=True)
        for name in fnmatch.filter(names, query)
    ]
    if not include_root_dir:
        found = [os.path.relpath(p, root_dir) for p in found]
    return sorted(found)


@contextlib.contextmanager
def atomic_open(path, mode="w", **kwargs):
    """Open a temporary file next to `path` and move it into place on success.

    Args:
        path (str): Final destination.
        mode (str): "w" or "wb".

    """
    folder_name = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder_name, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(
        dir=folder_name, prefix="." + os.path.basename(path) + "."
    )
    try:
        with os.fdopen(fd, mode, **kwargs) as f:
            yield f
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def read_csv(path, dict_reader=False):
    """Rows of a per-point table or the run index.

    Args:
        path (str): Csv file.
        dict_reader (bool): Whether the first line is a header to key rows by.

    Returns:
        list: Rows, as dicts or as lists of strings.
        list: Header, or None without dict_reader.

    """
    with open(path, newline="") as f:
        reader = csv.DictReader(f) if dict_reader else csv.reader(f)
        rows = list(reader)
        fieldnames = reader.fieldnames if dict_reader else None
    return rows, fieldnames


def write_csv(data, path, fieldnames=None):
    """Atomically write a list of row dicts.

    Args:
        data (list): Rows.
        path (str): Csv file.
        fieldnames (list): Header. Taken from the first row when omitted.

    """
    if fieldnames is None:
        if len(data) == 0:
            raise ValueError("Cannot infer the csv header from empty data.")
        fieldnames = list(data[0].keys())
    with atomic_open(path, "w", newline="") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=fieldnames)
        writer.writeheader()
        for line in data:
            writer.writerow(line)


def read_hdf5(archive, key):
    """One dataset of a path archive.

    Args:
        archive (str): paths.h5 file.
        key (str): Dataset name such as "walk/0/positions".

    Returns:
        ndarray: Stored values.

    Raises:
        FileNotFoundError: If the archive does not exist.
        KeyError: If it holds no dataset under key.

    """
    if not os.path.exists(archive):
        raise FileNotFoundError(f"no path archive at {archive}")
    with h5py.File(archive, "r") as f:
        if key not in f:
            raise KeyError(f"{archive} has no dataset {key!r}")
        return f[key][()]


def write_hdf5(archive, key, values, overwrite=True):
    """Store one array in a path archive, creating groups as needed.

    Args:
        archive (str): paths.h5 file, opened in append mode.
        key (str): Dataset name; slashes create groups.
        values (array-like): Data to store.
        overwrite (bool): Whether an existing dataset may be replaced.

    """
    values = np.asarray(values)
    folder_name = os.path.dirname(archive)
    if folder_name:
        os.makedirs(folder_name, exist_ok=True)
    with h5py.File(archive, "a") as f:
        if key in f:
            if not overwrite:
                raise ValueError(f"{archive} already holds {key!r}")
            logging.debug(f"Replacing {key} in {archive}.")
            del f[key]
        # no modification times, so equal data gives equal files
        f.create_dataset(key, data=values, track_times=False)


def _to_builtin(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def read_json(path):
    with open(path, "r") as f:
        return json.load(f)


def write_json(obj, path):
    """Write `obj` as sorted, indented JSON (atomic)."""
    with atomic_open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True, default=_to_builtin)
        f.write("\n")


def sha256_file(path, chunk_size=1 << 20):
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            sha.update(chunk)
    return sha.hexdigest()


def content_hash(obj):
    """Return the sha256 of the canonical JSON encoding of `obj`."""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_to_builtin)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def default_lab_dir():
    return os.environ.get("SINAI_LAB_DIR", "sinai_runs")


def register_run(outdir, verb, input_hash, status, lab_dir=None):
    """Append one row to the run index, guarded by a file lock.

    Args:
        outdir (str): Run directory.
        verb (str): Experiment verb.
        input_hash (str): Content hash of the inputs.
        status (int): Exit status of the run.
        lab_dir (str): Index root. Defaults to $SINAI_LAB_DIR.

    """
    lab_dir = default_lab_dir() if lab_dir is None else lab_dir
    os.makedirs(lab_dir, exist_ok=True)
    index_path = os.path.join(lab_dir, "index.csv")
    with FileLock(index_path + ".lock"):
        is_new = not os.path.exists(index_path)
        with open(index_path, "a", newline="") as csvfile:
            writer = csv.writer(csvfile)
            if is_new:
                writer.writerow(["outdir", "verb", "input_hash", "status"])
            writer.writerow([os.path.abspath(outdir), verb, input_hash, status])
