"""
Orchestration service behind the command line: loads a run config, runs the
requested computation and writes its outputs.
"""

import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from src.analysis.convergence import distortion_check, phi_empirical, verdict
from src.analysis.multifractal import (
    h_grid_from,
    large_deviation_spectrum,
    pointwise_holder,
    structure_exponents,
)
from src.cascades.factory import unit_mean_warnings
from src.config import settings
from src.exceptions import InfiniteMomentError, InsufficientDataError
from src.models.cascade import BadicIndependentModel, RunConfig
from src.models.reports import (
    HolderPoint,
    PhiReport,
    RunManifest,
    SpectrumReport,
    VerdictKind,
    VerifyReport,
)
from src.services.ensemble import ensemble_runner
from src.services.simulation import build_paths, total_variation
from src.services.verification import run_checks
from src.storage import RunWriter, config_hash, load_config

SCHEMA_MODELS = {
    "run_config": RunConfig,
    "phi_report": PhiReport,
    "spectrum_report": SpectrumReport,
    "verify_report": VerifyReport,
    "manifest": RunManifest,
}


class RunContext:
    """A loaded config with its hash, effective seed and output writer."""

    def __init__(self, config: RunConfig, out_dir: Path):
        self.config = config
        self.config_hash = config_hash(config)
        self.writer = RunWriter(out_dir, self.config_hash, config.seed)

    @property
    def model(self):
        return self.config.model

    @property
    def measure(self):
        return self.config.measure

    @property
    def seed(self) -> int:
        return self.config.seed


class OrchestrationService:
    """Runs the simulate, phi, spectrum and verify commands."""

    def prepare(self, config_path: str, seed: Optional[int] = None, out: Optional[str] = None,
                threads: Optional[int] = None) -> RunContext:
        """Validates the config completely before anything is sampled."""
        config = load_config(config_path)
        if seed is not None:
            config = config.model_copy(update={"seed": seed})
        out_dir = Path(out or config.output_dir or settings.output_dir)
        ensemble_runner.configure(threads)
        context = RunContext(config, out_dir)
        logger.info(f"Run '{config.name}': family={config.model.family}, seed={config.seed}, "
                    f"hash={context.config_hash}, output={out_dir}")
        return context

    def _finish(self, context: RunContext, command: str, started: datetime) -> None:
        context.writer.write_manifest(command, context.config.model_dump(mode="json"))
        duration = (datetime.now() - started).total_seconds()
        logger.info(f"{command} finished in {duration:.2f}s: {len(context.writer.files)} files in "
                    f"{context.writer.out_dir}")

    def cmd_simulate(self, context: RunContext) -> List[str]:
        """Path CSV per requested generation, from one coupled realization."""
        started = datetime.now()
        config = context.config
        generations = sorted(set(config.simulate.generations))
        unit_mean_warnings(context.model)

        paths = build_paths(context.model, context.measure, context.seed, n_max=max(generations),
                            m_sub=config.m_sub, name=config.name, config_hash=context.config_hash,
                            keep=generations)
        for n in generations:
            step = paths.stride(n) // paths.m_sub
            context.writer.write_path(n, paths.ts[::step], paths.generation(n)[::step])
            logger.info(f"Generation {n}: total variation {total_variation(paths, n):.6g}")
        self._finish(context, "simulate", started)
        return list(context.writer.files)

    def cmd_phi(self, context: RunContext) -> PhiReport:
        """Closed-form phi curve, verdict and the requested empirical slopes."""
        started = datetime.now()
        config = context.config
        options = config.phi
        replicas = options.replicas or config.replicas
        model, measure = context.model, context.measure

        def run_distortion(p: float):
            return distortion_check(model, measure, p, options.n_range, replicas, seed=context.seed,
                                    m_sub=config.m_sub)

        distortion = None if isinstance(model, BadicIndependentModel) else run_distortion
        report = verdict(model, measure, config.p_grid, distortion=distortion)
        warnings = list(report.warnings) + unit_mean_warnings(model)

        empirical = []
        if options.empirical:
            for p in options.empirical_p:
                try:
                    empirical.append(phi_empirical(model, measure, p, options.n_range, replicas,
                                                   seed=context.seed, m_sub=config.m_sub))
                except (InsufficientDataError, InfiniteMomentError) as e:
                    logger.warning(f"Empirical phi({p}) skipped: {e}")
                    warnings.append(f"empirical phi({p}) skipped: {e}")

        report = report.model_copy(update={
            "config_hash": context.config_hash,
            "seed": context.seed,
            "empirical": empirical,
            "warnings": warnings,
        })
        context.writer.write_report("phi_report", report)
        self._finish(context, "phi", started)
        return report

    def spectrum_range(self, config: RunConfig) -> Tuple[int, int]:
        if config.spectrum.n_range is not None:
            return config.spectrum.n_range
        return max(1, config.n_max // 2), config.n_max

    def cmd_spectrum(self, context: RunContext) -> SpectrumReport:
        """Large deviation spectrum and structure exponents of F_{n_max}."""
        started = datetime.now()
        config = context.config
        options = config.spectrum
        n_range = self.spectrum_range(config)

        paths = build_paths(context.model, context.measure, context.seed, n_max=config.n_max,
                            m_sub=config.m_sub, name=config.name, config_hash=context.config_hash,
                            keep=[config.n_max])
        values = paths.generation(config.n_max)
        h_grid = h_grid_from(options.h_min, options.h_max, options.h_step)
        report = large_deviation_spectrum(values, paths.b, n_range, options.epsilons, h_grid)

        try:
            structure = structure_exponents(values, paths.b, options.q_list, n_range)
        except InsufficientDataError as e:
            logger.warning(f"Structure exponents skipped: {e}")
            structure = []

        pointwise = []
        for t in options.holder_points:
            exponent = pointwise_holder(values, paths.b, t, n_range)
            pointwise.append(HolderPoint(t=t, exponent=exponent if math.isfinite(exponent) else None))
            logger.info(f"Pointwise Holder exponent at t={t}: {exponent:.4f}")

        report = report.model_copy(update={
            "config_hash": context.config_hash,
            "seed": context.seed,
            "structure": structure,
            "pointwise": pointwise,
        })
        context.writer.write_report("spectrum_report", report)
        for histogram in report.histograms:
            context.writer.write_histogram(histogram)
        self._finish(context, "spectrum", started)
        return report

    def cmd_verify(self, context: RunContext) -> VerifyReport:
        """Runs every statistical check; the report passes iff all checks pass."""
        started = datetime.now()
        config = context.config
        options = config.verify
        unit_mean_warnings(context.model)

        criterion = verdict(context.model, context.measure, config.p_grid)
        convergent = criterion.verdict.kind == VerdictKind.CONVERGES_UNIFORMLY
        checks = run_checks(
            context.model,
            context.measure,
            replicas=options.replicas or config.replicas,
            seed=context.seed,
            t_list=options.t_list,
            n_values=options.n_values,
            trend_range=options.trend_range,
            ratio_range=options.ratio_range,
            m_sub=config.m_sub,
            gamma_star=criterion.verdict.gamma_star,
            convergent=convergent,
        )
        report = VerifyReport(
            config_hash=context.config_hash,
            seed=context.seed,
            family=context.model.family,
            checks=checks,
            passed=all(check.passed for check in checks),
        )
        context.writer.write_report("verify_report", report)
        self._finish(context, "verify", started)
        if not report.passed:
            failed = [check.name for check in checks if not check.passed]
            logger.error(f"Verification failed: {', '.join(failed)}")
        return report

    def export_schemas(self, out_dir: str) -> List[str]:
        """JSON Schemas of the run config and every report."""
        writer = RunWriter(out_dir, config_hash="schema", seed=0)
        for name, model_class in SCHEMA_MODELS.items():
            writer.write_json(f"{name}.schema.json", model_class.model_json_schema())
        logger.info(f"Wrote {len(writer.files)} schemas to {out_dir}")
        return list(writer.files)

    def describe(self, config_path: str) -> Dict[str, Any]:
        """Summary of a config and its closed-form verdict; nothing is sampled."""
        config = load_config(config_path)
        report = verdict(config.model, config.measure, config.p_grid)
        phi_at = {point.p: point.value for point in report.closed_form}
        return {
            "name": config.name,
            "family": config.model.family,
            "b": config.model.b,
            "config_hash": config_hash(config),
            "seed": config.seed,
            "verdict": report.verdict.kind.value,
            "p_star": report.verdict.p_star,
            "gamma_star": report.verdict.gamma_star,
            "beta_critical": report.beta_critical,
            "beta_tilde": report.beta_tilde,
            "phi_2": phi_at.get(2.0),
            "warnings": report.warnings,
        }


# Global orchestrator instance
orchestrator = OrchestrationService()
