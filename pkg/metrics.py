#!/usr/bin/env python3
"""
Prometheus Uyumlu Koşu Metrikleri Modülü

Bu modül, simülasyon ve doğrulama koşularının sayısını, süresini,
adım sayılarını ve başarısız kontrollerini Prometheus metrikleri olarak tutar.

Özellikler:
- Koşu türü bazlı sayaç ve süre histogramı
- Çözücü bazlı adım sayacı
- Kontrol türü bazlı hata sayacı
- Metin biçiminde (textfile) dışa aktarma
"""

import time
import logging
from typing import Optional, Dict, Any
from contextlib import contextmanager
import argparse
import json
from datetime import datetime

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# Prometheus client import
try:
    from prometheus_client import CollectorRegistry, Counter, Histogram, Gauge, write_to_textfile
    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False
    logger.warning("prometheus_client kütüphanesi bulunamadı, metrik izleme devre dışı "
                   "(kurulum: pip install prometheus_client)")


def _empty_stats() -> Dict[str, Any]:
    return {
        'total_runs': 0,
        'total_steps': 0,
        'total_errors': 0,
        'check_failures': 0,
        'run_stats': {},
        'last_run_time': None
    }


class SimulationMetrics:
    """Koşu metrikleri toplayıcı (kendi CollectorRegistry'si ile)"""

    def __init__(self):
        self.metrics_initialized = False
        self.registry = None

        # Metrik objeleri
        self.run_counter = None
        self.step_counter = None
        self.run_latency_histogram = None
        self.active_runs = None
        self.check_failure_counter = None

        self.stats = _empty_stats()

        if PROMETHEUS_AVAILABLE:
            self.init_metrics()

    def init_metrics(self):
        """Prometheus metrik objelerini başlat"""
        if not PROMETHEUS_AVAILABLE:
            logger.warning("Prometheus client mevcut değil, metrikler devre dışı")
            return

        try:
            self.registry = CollectorRegistry()

            self.run_counter = Counter(
                'kinetik_runs_total',
                'Toplam koşu sayısı',
                ['kind', 'status'],
                registry=self.registry
            )

            self.step_counter = Counter(
                'kinetik_steps_total',
                'Toplam zaman adımı sayısı',
                ['solver'],
                registry=self.registry
            )

            self.run_latency_histogram = Histogram(
                'kinetik_run_seconds',
                'Koşu süresi (saniye)',
                ['kind'],
                buckets=[0.1, 0.5, 1.0, 5.0, 30.0, 120.0, 300.0],
                registry=self.registry
            )

            self.active_runs = Gauge(
                'kinetik_active_runs',
                'Devam eden koşu sayısı',
                ['kind'],
                registry=self.registry
            )

            self.check_failure_counter = Counter(
                'kinetik_check_failures_total',
                'Başarısız değişmez kontrolü sayısı',
                ['kind'],
                registry=self.registry
            )

            self.metrics_initialized = True
            logger.info("Prometheus metrikleri başlatıldı")

        except Exception as e:
            logger.error(f"Metrik başlatma hatası: {e}")
            self.metrics_initialized = False

    def log_run(self, kind: str, latency: float = 0.0, error_type: Optional[str] = None):
        """
        Tamamlanan koşuyu logla

        Args:
            kind: Koşu türü (particle, kinetic_density, ...)
            latency: Süre (saniye)
            error_type: Hata tipi (varsa)
        """
        try:
            self.stats['total_runs'] += 1
            self.stats['last_run_time'] = datetime.now().isoformat()
            entry = self.stats['run_stats'].setdefault(kind, {'runs': 0, 'errors': 0, 'total_latency': 0.0})
            entry['runs'] += 1
            entry['total_latency'] += latency
            if error_type:
                self.stats['total_errors'] += 1
                entry['errors'] += 1

            if self.metrics_initialized:
                status = 'error' if error_type else 'ok'
                self.run_counter.labels(kind=kind, status=status).inc()
                if latency > 0:
                    self.run_latency_histogram.labels(kind=kind).observe(latency)

            logger.info(f"Koşu loglandı: {kind} - Süre: {latency:.3f}s"
                        + (f", Hata: {error_type}" if error_type else ""))

        except Exception as e:
            logger.error(f"Metrik loglama hatası: {e}")

    def log_steps(self, solver: str, steps: int):
        """Çözücü adımlarını say"""
        self.stats['total_steps'] += int(steps)
        if self.metrics_initialized and steps > 0:
            self.step_counter.labels(solver=solver).inc(steps)

    def log_check(self, kind: str, passed: bool):
        """Değişmez kontrolü sonucunu kaydet"""
        if passed:
            return
        self.stats['check_failures'] += 1
        if self.metrics_initialized:
            self.check_failure_counter.labels(kind=kind).inc()

    @contextmanager
    def track_run(self, kind: str):
        """
        Koşuyu otomatik olarak izleyen context manager

        Usage:
            with metrics.track_run("particle"):
                manifest = run_scenario(scenario)
        """
        start_time = time.perf_counter()
        error_type = None

        try:
            if self.metrics_initialized:
                self.active_runs.labels(kind=kind).inc()

            yield

        except Exception as e:
            error_type = type(e).__name__
            raise

        finally:
            if self.metrics_initialized:
                self.active_runs.labels(kind=kind).dec()

            latency = time.perf_counter() - start_time
            self.log_run(kind, latency=latency, error_type=error_type)

    def get_metrics_summary(self) -> Dict[str, Any]:
        """Mevcut metrik özetini döndür"""
        summary = {
            'metrics_enabled': self.metrics_initialized,
            'stats': json.loads(json.dumps(self.stats)),
            'prometheus_available': PROMETHEUS_AVAILABLE
        }

        if self.stats['run_stats']:
            summary['run_summary'] = {}
            for kind, stats in self.stats['run_stats'].items():
                avg_latency = stats['total_latency'] / stats['runs'] if stats['runs'] > 0 else 0
                summary['run_summary'][kind] = {
                    'total_runs': stats['runs'],
                    'total_errors': stats['errors'],
                    'avg_latency': round(avg_latency, 3),
                    'error_rate': round(stats['errors'] / stats['runs'] * 100, 2) if stats['runs'] > 0 else 0
                }

        return summary

    def export_metrics(self, output_file: str = None) -> str:
        """
        Metrik özetini JSON dosyasına dışa aktar

        Args:
            output_file: Çıktı dosya adı (opsiyonel)

        Returns:
            Kaydedilen dosya yolu
        """
        if not output_file:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            output_file = f"metrics_export_{timestamp}.json"

        try:
            metrics_data = self.get_metrics_summary()
            metrics_data['export_time'] = datetime.now().isoformat()

            with open(output_file, 'w', encoding='utf-8') as f:
                json.dump(metrics_data, f, indent=2, ensure_ascii=False)

            logger.info(f"Metrikler dışa aktarıldı: {output_file}")
            return output_file

        except Exception as e:
            logger.error(f"Metrik dışa aktarma hatası: {e}")
            return ""

    def write_textfile(self, path: str) -> bool:
        """Prometheus metin biçiminde dosyaya yaz (node-exporter textfile toplayıcısı için)"""
        if not self.metrics_initialized:
            logger.warning("Metrikler devre dışı, textfile yazılmadı")
            return False
        try:
            write_to_textfile(path, self.registry)
            logger.info(f"Prometheus textfile yazıldı: {path}")
            return True
        except Exception as e:
            logger.error(f"Textfile yazma hatası: {e}")
            return False

    def reset_metrics(self):
        """İstatistikleri sıfırla"""
        self.stats = _empty_stats()
        logger.info("Metrikler sıfırlandı")


# Global metrics instance
_simulation_metrics = None


def get_simulation_metrics() -> SimulationMetrics:
    """Global SimulationMetrics instance'ını döndür"""
    global _simulation_metrics
    if _simulation_metrics is None:
        _simulation_metrics = SimulationMetrics()
    return _simulation_metrics


@contextmanager
def track_run(kind: str):
    """Global koşu izleme context manager'ı"""
    collector = get_simulation_metrics()
    with collector.track_run(kind):
        yield


def log_steps(solver: str, steps: int):
    get_simulation_metrics().log_steps(solver, steps)


def log_check(kind: str, passed: bool):
    get_simulation_metrics().log_check(kind, passed)


def get_metrics_summary() -> Dict[str, Any]:
    """Global metrik özeti alma fonksiyonu"""
    return get_simulation_metrics().get_metrics_summary()


def export_metrics(output_file: str = None) -> str:
    """Global metrik dışa aktarma fonksiyonu"""
    return get_simulation_metrics().export_metrics(output_file)


def reset_metrics():
    """Global metrik sıfırlama fonksiyonu"""
    get_simulation_metrics().reset_metrics()


def main():
    """CLI arayüzü"""
    parser = argparse.ArgumentParser(description="Kinetik Koşu Metrikleri")
    parser.add_argument('--action', choices=['summary', 'export', 'reset'],
                        default='summary', help='Yapılacak işlem')
    parser.add_argument('--output', help='Dışa aktarma dosya adı')

    args = parser.parse_args()

    collector = get_simulation_metrics()

    if args.action == 'summary':
        summary = collector.get_metrics_summary()
        print("📊 Metrik Özeti:")
        print(f"  Metrikler Aktif: {summary['metrics_enabled']}")
        print(f"  Prometheus Mevcut: {summary['prometheus_available']}")
        print(f"  Toplam Koşu: {summary['stats']['total_runs']}")
        print(f"  Toplam Adım: {summary['stats']['total_steps']}")
        print(f"  Başarısız Kontrol: {summary['stats']['check_failures']}")

    elif args.action == 'export':
        output_file = collector.export_metrics(args.output)
        if output_file:
            print(f"✅ Metrikler dışa aktarıldı: {output_file}")
        else:
            print("❌ Metrik dışa aktarma hatası")

    elif args.action == 'reset':
        collector.reset_metrics()
        print("✅ Metrikler sıfırlandı")


if __name__ == "__main__":
    main()
