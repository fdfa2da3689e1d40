#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
🗂️ Çıktı Dosyaları Modülü

Koşu çıktılarının bayt-deterministik yazımı:
- CSV (RFC-4180: CRLF satır sonu, gerektiğinde tırnak)
- PGM P5 ısı haritaları (8 bit gri, en yüksek değer 255)
- SVG 1.1 çizgi grafikleri (matplotlib Agg, sabit hash tuzu, tarih yok)
- SHA-256 içerik özetleri
"""

import hashlib
import logging
from pathlib import Path
from typing import Mapping, Sequence, Tuple, Union

import numpy as np
import pandas as pd

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SVG_HASH_SALT = "kinetik"

Series = Tuple[Sequence[float], Sequence[float]]


def sha256_file(path: Union[str, Path]) -> str:
    """Dosya içeriğinin SHA-256 özeti"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """DataFrame'i RFC-4180 uyumlu CSV olarak yaz"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\r\n", float_format="%.17g", encoding="utf-8")
    logger.info(f"CSV yazıldı: {path}")
    return path


def _check_data(values: np.ndarray):
    if values.size == 0:
        raise ValueError("no data")
    if not np.all(np.isfinite(values)):
        raise ValueError("Çizim verisi sonlu olmayan değer içeriyor")


def write_pgm(values: np.ndarray, path: Union[str, Path]) -> Path:
    """
    2B diziyi PGM P5 ısı haritası olarak yaz

    Satırlar ilk eksen, sütunlar ikinci eksen; değerler [min, max] → [0, 255].
    """
    values = np.asarray(values, dtype=float)
    _check_data(values)
    if values.ndim != 2:
        raise ValueError(f"Isı haritası 2B olmalı, gelen şekil {values.shape}")
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo
    scaled = np.zeros(values.shape) if span == 0 else (values - lo) / span
    gray = np.rint(scaled * 255.0).astype(np.uint8)
    rows, cols = gray.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        f.write(gray.tobytes())
    logger.info(f"PGM yazıldı: {path}")
    return path


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    """write_pgm çıktısını geri oku (testler için)"""
    data = Path(path).read_bytes()
    magic, size, maxval, body = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError(f"Desteklenmeyen PGM başlığı: {path}")
    cols, rows = (int(v) for v in size.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)


def write_svg_lines(series: Mapping[str, Series], path: Union[str, Path],
                    title: str = "", xlabel: str = "t", ylabel: str = "") -> Path:
    """Adlandırılmış (x, y) serilerini SVG çizgi grafiği olarak yaz"""
    if not series:
        raise ValueError("no data")
    for name, (x, y) in series.items():
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        _check_data(y)
        if x.shape != y.shape:
            raise ValueError(f"{name}: x ve y uzunlukları farklı")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for name in sorted(series):
            x, y = series[name]
            ax.plot(np.asarray(x, dtype=float), np.asarray(y, dtype=float), label=name, linewidth=1.2)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        if len(series) > 1:
            ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info(f"SVG yazıldı: {path}")
    return path


def emit_plot(data, kind: str, path: Union[str, Path], **labels) -> Path:
    """
    Çizim çıktısı üret

    Args:
        data: line için {ad: (x, y)} ya da DataFrame (ilk sütun x); heatmap için 2B dizi
        kind: line | heatmap
        path: Çıktı dosyası (.svg veya .pgm)

    Returns:
        Yazılan dosya yolu

    Raises:
        ValueError: "no data" ya da sonlu olmayan veri
    """
    try:
        if kind == "heatmap":
            return write_pgm(np.asarray(data), path)
        if kind != "line":
            raise ValueError(f"Bilinmeyen çizim türü: {kind}")
        if isinstance(data, pd.DataFrame):
            if data.empty or data.shape[1] < 2:
                raise ValueError("no data")
            x = data.iloc[:, 0].to_numpy()
            data = {col: (x, data[col].to_numpy()) for col in data.columns[1:]}
        return write_svg_lines(data, path, **labels)
    except OSError as e:
        logger.error(f"Çizim yazılamadı: {path}: {e}")
        raise
