import json
import logging
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from ris_kit.config import SWEEP_GENERATION_FACTOR
from ris_kit.models.channel import PhaseShifts
from ris_kit.schemas.scenario import ScenarioConfig
from ris_kit.schemas.sweep import RESULT_CSV_HEADER, ResultRow, SweepSpec
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.ga_service import GaService
from ris_kit.services.monte_carlo_service import MonteCarloService
from ris_kit.services.scenario_service import ScenarioService
from ris_kit.utils.error_handlers import ConfigError, config_error_from_pydantic
from ris_kit.utils.parallel import ordered_map
from ris_kit.utils.rng import SWEEP_STREAM, derive_seed
from ris_kit.utils.timing import timed

logger = logging.getLogger(__name__)


class SweepService:
    """
    Parameter sweeps over transmit power, array sizes or RIS-BS distance,
    scoring each point under the requested phase modes.
    """

    @staticmethod
    def load_spec(path: str) -> SweepSpec:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"Sweep spec not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Sweep spec {path} is not valid JSON: {e}") from e
        try:
            return SweepSpec.model_validate(data)
        except ValidationError as e:
            raise config_error_from_pydantic(e, f"sweep spec {path}") from e

    @staticmethod
    def point_config(spec: SweepSpec, value: float) -> ScenarioConfig:
        """Base config with the swept variable set to `value`"""
        data = spec.base.model_dump()
        if spec.variable == "transmit_power_dbm":
            data["p_dbm"] = [float(value)] * spec.base.K
            data["p_watt"] = None
        elif spec.variable == "M":
            data["M"] = int(value)
        elif spec.variable == "N":
            data["N"] = int(value)
        elif spec.variable == "MN":
            data["M"] = data["N"] = int(value)
        elif spec.variable == "d_ib":
            data["d_ib"] = float(value)
        return ScenarioService.parse_config(data, source=f"sweep point {spec.variable}={value}")

    @staticmethod
    def ga_config(spec: SweepSpec):
        if spec.ga.max_generations is not None:
            return spec.ga
        factor = SWEEP_GENERATION_FACTOR if spec.generation_factor is None else spec.generation_factor
        return spec.ga.model_copy(update={"generation_factor": factor})

    @staticmethod
    def run_point(spec: SweepSpec, index: int, value: float, seed: int) -> ResultRow:
        point_seed = derive_seed(seed, SWEEP_STREAM, index)
        with timed(f"sweep point {spec.variable}={value}") as watch:
            scenario = ScenarioService.build_scenario(SweepService.point_config(spec, value), seed=spec.base.seed)
            fields = {"value": float(value), "seed": point_seed}

            best: Optional[PhaseShifts] = None
            if "optimal_ga" in spec.modes:
                best, _ = GaService.run(scenario, SweepService.ga_config(spec), point_seed)
                fields["optimal_ga"] = ClosedFormService.sum_rate(best, scenario)
            if "random_phase" in spec.modes:
                fields["random_phase"] = MonteCarloService.random_phase_rate(
                    scenario, None, spec.phase_draws, point_seed
                ).mean
            if "no_ris" in spec.modes:
                fields["no_ris"] = float(sum(
                    ClosedFormService.rate_no_ris(k, scenario) for k in range(1, scenario.K + 1)
                ))
            if "mc_check" in spec.modes:
                phases = best if best is not None else PhaseShifts(np.zeros(scenario.N))
                estimate = MonteCarloService.sum_rate_mc(scenario, phases, spec.mc_trials, point_seed)
                fields["mc_estimate"] = estimate.mean
                fields["mc_std_error"] = estimate.std_error
        fields["wall_time"] = watch.elapsed
        logger.info(f"Sweep point {spec.variable}={value} done in {watch.elapsed:.2f}s")
        return ResultRow(**fields)

    @staticmethod
    def run(spec: SweepSpec, seed: int) -> List[ResultRow]:
        """All points, concurrently; rows come back in spec order"""
        # fail on any bad point before spending time on the others
        for value in spec.values:
            SweepService.point_config(spec, value)
        logger.info(f"Sweeping {spec.variable} over {len(spec.values)} points, modes={spec.modes}")
        return ordered_map(
            lambda item: SweepService.run_point(spec, item[0], item[1], seed),
            list(enumerate(spec.values)),
        )

    @staticmethod
    def csv_header(timings: bool = False):
        return RESULT_CSV_HEADER + (("wall_time",) if timings else ())

    @staticmethod
    def csv_rows(rows: List[ResultRow], timings: bool = False):
        for row in rows:
            values = [getattr(row, name) for name in RESULT_CSV_HEADER]
            if timings:
                values.append(row.wall_time)
            yield values
