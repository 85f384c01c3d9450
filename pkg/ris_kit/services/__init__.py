from ris_kit.services.scenario_service import ScenarioService
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.monte_carlo_service import MonteCarloService
from ris_kit.services.ga_service import GaService
from ris_kit.services.sweep_service import SweepService
