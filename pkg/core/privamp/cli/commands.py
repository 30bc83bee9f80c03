"""
    CLI Commands: concrete command implementations.

    Design Pattern: Command
    ───────────────────────
    Each command encapsulates one toolkit computation as an object with
    ``execute(context) → CommandResult``.  The ``RunContext`` carries the
    resolved ``PlatformConfig``, the serializer and the raw options, so a
    command only reads its parameters, calls the services and hands the
    result back for rendering.

    Supported commands:
    ───────────────────
        entropy   --alpha A,... --kinds K,...
        exponent  --family pa|wiretap|ea --side ... --rate R,... --n N,...
        simulate  --u U --v V [--n N,...] [--mode exact|mc|sandwich] [--trials T] [--breakdown]
        wiretap   (--channel PATH|NAME | --kraus PATH --inputs PATH) --M M --L L [--prior p,...]
        verify    [--checks C,...] [--trials T]
        moderate  --kind K --t T --n N,...
        ea        --f F --V V --prob P --rate R,... --n N,... --side ach|conv
        help
"""
import logging
import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar, Dict, FrozenSet, List, Optional, Tuple

from api.exceptions import ConvergenceError, ValidationError
from api.models.cq_state import CQState, WiretapChannel
from api.models.hashing import GFContext
from api.models.reports import EAParams, ModerateSchedule
from api.types import ModerateKind, TypeValidator, Units, ValueType

from services.bounds import extractable_length, leftover_hash_bound, quantum_wiretap
from services.exponents import (
    ea_report, moderate_ea_table, moderate_table, pa_achievability_exponent, pa_converse_exponent,
    wiretap_converse_exponent, wiretap_error_exponent, wiretap_secrecy_exponent,
)
from services.fixtures import FIXTURES, WIRETAP_FIXTURES, fixture_channel, fixture_state
from services.renyi import h_down, h_down_star, h_star_result, i_down, i_star_result
from services.serialization_service import ResultSerializer
from services.simulator import (
    exact_pa_distance, sampled_pa_distance, sandwich_check, sweep, wiretap_sandwich,
)
from services.verifier import CHECK_NAMES, run_battery

from ..config import PlatformConfig

logger = logging.getLogger(__name__)


# ── Result wrapper ───────────────────────────────────────────────

@dataclass
class CommandResult:
    """
    Value object returned by every command execution.

    Attributes:
        success:   Whether the command completed and its checks passed.
        message:   One-line human-readable summary or diagnostic.
        exit_code: Process exit status (0 on success).
        output:    Rendered JSON or CSV text.
        data:      The structured payload before rendering.
    """
    success: bool
    message: str
    exit_code: int = 0
    output: str = ""
    data: Optional[Dict[str, Any]] = field(default_factory=dict)


# ── Run context ──────────────────────────────────────────────────

@dataclass
class RunContext:
    """
    Everything a command needs: resolved configuration, codec and options.
    """
    config: PlatformConfig
    serializer: ResultSerializer
    options: Dict[str, Any]

    def get(self, name: str, value_type: ValueType = ValueType.STR, default: Any = None) -> Any:
        if name not in self.options:
            return default
        return TypeValidator.validate_and_convert(self.options[name], value_type, f"--{name}")

    def require(self, name: str, value_type: ValueType = ValueType.STR) -> Any:
        if name not in self.options:
            raise ValidationError(f"Missing required option --{name}.")
        return self.get(name, value_type)

    def flag(self, name: str) -> bool:
        return self.options.get(name) in (True, "true", "1", "yes")

    def rates(self, name: str = "rate") -> List[float]:
        """Rate list converted from the display units to nats."""
        units = self.config.serialization.units
        return [units.to_nats(r) for r in self.require(name, ValueType.FLOAT_LIST)]

    def load_state(self) -> Tuple[CQState, Dict[str, Any]]:
        """
        The c-q state named by ``--state PATH`` or ``--fixture NAME``.

        Returns:
            (state, provenance record with source and SHA-256)
        """
        path, name = self.options.get("state"), self.options.get("fixture")
        if path and name:
            raise ValidationError("Use either --state or --fixture, not both.")
        if name:
            state = fixture_state(str(name))
            source = f"fixture:{name}"
        elif path:
            state = self.serializer.load_state(str(path))
            source = os.path.basename(str(path))
        else:
            raise ValidationError(f"A state is required: --state PATH or --fixture "
                                  f"({', '.join(FIXTURES)}).")
        return state, {"source": source, "sha256": self.serializer.content_hash(state)}

    def emit(self, command: str, params: Dict[str, Any], inputs: Dict[str, Any], result: Any,
             rows: Optional[List[Dict[str, Any]]] = None, message: str = "",
             units: Optional[Units] = None) -> CommandResult:
        """Render ``result``; ``units`` pins the display unit regardless of --units."""
        serializer = self.serializer if units is None else self.serializer.in_units(units)
        config = {"platform": self.config.to_dict(), "params": params}
        payload = serializer.envelope(command, config, inputs, result)
        output = serializer.render(payload, rows)
        return CommandResult(True, message or f"{command}: done.", 0, output, payload)


# ── Abstract base ────────────────────────────────────────────────

class Command(ABC):
    """
    Abstract base for all CLI commands.

    Class attributes:
        name:    Verb that selects the command.
        options: Command-specific option names (global options are always allowed).
    """
    name: ClassVar[str]
    options: ClassVar[FrozenSet[str]] = frozenset()

    @abstractmethod
    def execute(self, context: RunContext) -> CommandResult:
        ...


def _params(context: RunContext, command: Command) -> Dict[str, Any]:
    return {k: v for k, v in sorted(context.options.items()) if k in command.options}


# ═════════════════════════════════════════════════════════════════
#  ENTROPIES
# ═════════════════════════════════════════════════════════════════

_ENTROPY_KINDS = ("down", "star", "down_star", "i_down", "i_star")


class EntropyCommand(Command):
    """
    Conditional entropies and mutual informations of a c-q state.

    Syntax:
        entropy --fixture uniform-bit --alpha 0.75,1,2 --kinds down,star
    """
    name = "entropy"
    options = frozenset({"alpha", "kinds"})

    def execute(self, context: RunContext) -> CommandResult:
        state, provenance = context.load_state()
        alphas = context.get("alpha", ValueType.FLOAT_LIST, [0.75, 1.0, 1.5, 2.0])
        kinds = [k.strip().lower() for k in str(context.options.get("kinds", "down,star")).split(",")
                 if k.strip()]
        unknown = [k for k in kinds if k not in _ENTROPY_KINDS]
        if unknown:
            raise ValidationError(f"Unknown kind(s) {', '.join(unknown)}. "
                                  f"Expected any of: {', '.join(_ENTROPY_KINDS)}.")
        rows = [self._row(state, kind, alpha, context) for kind in kinds for alpha in alphas]
        return context.emit(self.name, _params(context, self), {"state": provenance},
                            {"rows": rows}, rows, f"entropy: {len(rows)} row(s).")

    @staticmethod
    def _row(state: CQState, kind: str, alpha: float, context: RunContext) -> Dict[str, Any]:
        optimizer = context.config.optimizer
        converged = True
        if kind in ("down", "i_down") and alpha <= 0:
            raise ValidationError(f"α must be positive, got {alpha}.")
        if kind == "down":
            value = h_down(state, alpha)
        elif kind == "down_star":
            value = h_down_star(state, alpha)
        elif kind == "i_down":
            value = i_down(state, alpha)
        else:
            try:
                if kind == "star":
                    value = h_star_result(state, alpha, optimizer)[0]
                else:
                    value = i_star_result(state, alpha, optimizer)[0]
            except ConvergenceError as e:
                logger.warning("%s at α=%g did not converge (residual %.3e)", kind, alpha, e.residual)
                value = -e.best_value if kind == "star" else e.best_value
                converged = False
        column = "information" if kind.startswith("i_") else "entropy"
        return {"kind": kind, "alpha": float(alpha), column: float(value), "converged": converged}


# ═════════════════════════════════════════════════════════════════
#  EXPONENTS AND BOUNDS
# ═════════════════════════════════════════════════════════════════

_PA_SERVICES = {"ach": pa_achievability_exponent, "conv": pa_converse_exponent}
_WIRETAP_SERVICES = {"ach": wiretap_secrecy_exponent, "conv": wiretap_converse_exponent,
                     "err": wiretap_error_exponent}


def _report_rows(report_dict: Dict[str, Any]) -> List[Dict[str, Any]]:
    """One CSV row per blocklength (or one row without bounds)."""
    base = {k: report_dict[k] for k in ("kind", "rate", "exponent", "alpha_star", "threshold",
                                        "vacuous")}
    bounds = report_dict["bounds"]
    if not bounds:
        return [base]
    raw = report_dict["raw"]["bounds"]
    return [dict(base, n=int(n), bound=b, raw_bound=raw[n]) for n, b in bounds.items()]


class ExponentCommand(Command):
    """
    Exponents and finite-blocklength bounds.

    Syntax:
        exponent --fixture correlated-bit --family pa --side conv --rate 0.6931 --n 1,10
        exponent --fixture classical-quarter --family pa --side length --eps 0.01
        exponent --family ea --side conv --f 1 --V 2.5 --prob 0.1 --rate 1.5 --n 1000
    """
    name = "exponent"
    options = frozenset({"family", "side", "rate", "n", "eps", "f", "V", "prob"})

    def execute(self, context: RunContext) -> CommandResult:
        family = str(context.require("family")).lower()
        side = str(context.require("side")).lower()
        if family == "ea":
            return EACommand().execute(context, command_name=self.name, params=_params(context, self))
        if family not in ("pa", "wiretap"):
            raise ValidationError(f"Unknown family '{family}'. Expected one of: pa, wiretap, ea.")

        state, provenance = context.load_state()
        inputs = {"state": provenance}
        params = _params(context, self)
        cfg = context.config
        n_list = context.get("n", ValueType.INT_LIST, [1])

        if family == "pa" and side == "length":
            eps = context.require("eps", ValueType.FLOAT)
            report = extractable_length(state, eps, cfg.exponents, cfg.optimizer).to_dict()
            return context.emit(self.name, params, inputs, report, [report],
                                f"extractable length at ε={eps:g}.")
        if family == "pa" and side == "lhl":
            rows = [{"kind": "pa_lhl", "rate": rate, "n": int(n),
                     "bound": leftover_hash_bound(state, rate, int(n), cfg.optimizer)}
                    for rate in context.rates() for n in n_list]
            return context.emit(self.name, params, inputs, {"rows": rows}, rows)

        services = _PA_SERVICES if family == "pa" else _WIRETAP_SERVICES
        if side not in services:
            raise ValidationError(f"Unknown side '{side}' for family {family}. "
                                  f"Expected one of: {', '.join(services)}"
                                  f"{', lhl, length' if family == 'pa' else ''}.")
        reports = [services[side](state, rate, n_list, cfg.exponents, cfg.optimizer).to_dict()
                   for rate in context.rates()]
        vacuous = sum(1 for r in reports if r["vacuous"])
        if vacuous:
            logger.warning("%d of %d rate(s) give a zero exponent", vacuous, len(reports))
        rows = [row for r in reports for row in _report_rows(r)]
        return context.emit(self.name, params, inputs, {"reports": reports}, rows,
                            f"{family} {side}: {len(reports)} report(s), {vacuous} vacuous.")


class EACommand(Command):
    """
    Entropy-accumulation bounds.  Parameters and results are in nats regardless of --units.

    Syntax:
        ea --f 1.0 --V 2.5 --prob 0.1 --rate 1.5 --n 1000 --side conv
    """
    name = "ea"
    options = frozenset({"f", "V", "prob", "rate", "n", "side"})

    def execute(self, context: RunContext, command_name: Optional[str] = None,
                params: Optional[Dict[str, Any]] = None) -> CommandResult:
        side = str(context.options.get("side", "conv")).lower()
        f_w = context.require("f", ValueType.FLOAT)
        v = context.require("V", ValueType.FLOAT)
        prob = context.require("prob", ValueType.FLOAT)
        rates = context.require("rate", ValueType.FLOAT_LIST)
        n_list = context.get("n", ValueType.INT_LIST, [1])
        reports = [ea_report(EAParams(f_w=f_w, V=v, prob_w=prob, R=r, n=n), side).to_dict()
                   for r in rates for n in n_list]
        rows = [dict(r["params"], side=r["side"], raw=r["raw"], value=r["value"],
                     vacuous=r["vacuous"]) for r in reports]
        return context.emit(command_name or self.name,
                            params if params is not None else _params(context, self),
                            {}, {"reports": reports}, rows, f"ea {side}: {len(reports)} bound(s).",
                            units=Units.NATS)


# ═════════════════════════════════════════════════════════════════
#  SIMULATION
# ═════════════════════════════════════════════════════════════════

class SimulateCommand(Command):
    """
    Exact or sampled ε_PA, or the sandwich harness.

    Syntax:
        simulate --fixture product-uniform-2bit --u 2 --v 1
        simulate --fixture correlated-bit --u 1 --v 1 --mode sandwich --n 1,2
        simulate --state s.json --u 3 --v 2 --mode mc --trials 500 --seed 7
    """
    name = "simulate"
    options = frozenset({"u", "v", "n", "mode", "trials", "breakdown"})

    def execute(self, context: RunContext) -> CommandResult:
        state, provenance = context.load_state()
        u = context.require("u", ValueType.INT)
        v = context.require("v", ValueType.INT)
        n_list = context.get("n", ValueType.INT_LIST, [1])
        mode = str(context.options.get("mode", "exact")).lower()
        cfg = context.config
        ctx = GFContext(u)
        if state.alphabet_size < ctx.order:
            state = state.padded(ctx.order)
        inputs = {"state": provenance}
        params = _params(context, self)

        if mode == "sandwich":
            if len(n_list) == 1:
                report = sandwich_check(state, ctx, v, n_list[0], cfg.limits, cfg.exponents,
                                        cfg.optimizer, cfg.max_workers)
                result = report.to_dict()
                row = dict(result, verdict="pass" if report.passed else "fail")
                return context.emit(self.name, params, inputs, result, [row],
                                    f"sandwich {'pass' if report.passed else 'FAIL'} at n={report.n}.")
            rows = [r.to_dict() for r in sweep(state, ctx, v, n_list, cfg.limits, cfg.exponents,
                                               cfg.optimizer, cfg.max_workers)]
            return context.emit(self.name, params, inputs, {"rows": rows}, rows,
                                f"sweep over {len(rows)} blocklength(s).")

        if mode not in ("exact", "mc"):
            raise ValidationError(f"Unknown mode '{mode}'. Expected one of: exact, mc, sandwich.")
        if len(n_list) != 1:
            raise ValidationError(f"Mode {mode} takes a single --n, got {n_list}.")
        n = n_list[0]
        if n > 1:
            state = state.iid_extend(n, cfg.limits.explicit_size)
            ctx, v = GFContext(n * u), n * v
        breakdown = context.flag("breakdown") or cfg.serialization.include_breakdown
        if mode == "exact":
            result = exact_pa_distance(state, ctx, v, breakdown, cfg.limits, cfg.max_workers)
        else:
            trials = context.get("trials", ValueType.INT, 1000)
            result = sampled_pa_distance(state, ctx, v, trials, cfg.seed, breakdown)
        data = result.to_dict(include_breakdown=breakdown)
        row = {k: val for k, val in data.items() if k != "per_hash"}
        return context.emit(self.name, params, inputs, data, [row], f"ε_PA = {result.value:.12g}.")


class WiretapCommand(Command):
    """
    Wiretap exponents and the d₁ sandwich.

    Syntax:
        wiretap --channel orthogonal-eve --M 2 --L 2
        wiretap --kraus k.json --inputs in.json --prior 0.5,0.5 --M 2 --L 2 --mode mc
    """
    name = "wiretap"
    options = frozenset({"channel", "kraus", "inputs", "prior", "M", "L", "mode", "trials"})

    def _channel(self, context: RunContext, prior: Optional[List[float]]
                 ) -> Tuple[WiretapChannel, Dict[str, Any]]:
        serializer = context.serializer
        channel, kraus = context.options.get("channel"), context.options.get("kraus")
        if bool(channel) == bool(kraus):
            raise ValidationError("Give exactly one of --channel or --kraus (with --inputs).")
        if channel:
            channel = str(channel)
            if channel in WIRETAP_FIXTURES:
                wiretap = fixture_channel(channel)
                return wiretap, {"source": f"fixture:{channel}",
                                 "sha256": serializer.content_hash(wiretap)}
            wiretap = serializer.load_wiretap(channel)
            return wiretap, {"source": os.path.basename(channel),
                             "sha256": serializer.content_hash(wiretap)}
        inputs_path = context.require("inputs")
        kraus_channel = serializer.load_kraus(str(kraus))
        states = serializer.load_inputs(str(inputs_path))
        p = prior if prior is not None else [1.0 / len(states)] * len(states)
        wiretap, _, _ = quantum_wiretap(kraus_channel, states, p)
        return wiretap, {"source": os.path.basename(str(kraus)),
                         "sha256": serializer.content_hash(kraus_channel),
                         "inputs_sha256": serializer.content_hash(serializer.load_json(str(inputs_path)))}

    def execute(self, context: RunContext) -> CommandResult:
        prior = context.get("prior", ValueType.FLOAT_LIST)
        wiretap, provenance = self._channel(context, prior)
        if prior is None:
            prior = [1.0 / wiretap.alphabet_size] * wiretap.alphabet_size
        M = context.require("M", ValueType.INT)
        L = context.require("L", ValueType.INT)
        if M < 1 or L < 1:
            raise ValidationError(f"M and L must be positive, got M={M}, L={L}.")
        mode = str(context.options.get("mode", "exact")).lower()
        trials = context.get("trials", ValueType.INT, 1000)
        cfg = context.config

        sigma_xb = wiretap.induced_cq(prior, "B")
        error = wiretap_error_exponent(sigma_xb, math.log(M * L), (1,), cfg.exponents, cfg.optimizer)
        report = wiretap_sandwich(wiretap, prior, M, L, mode, trials, cfg.seed, cfg.limits,
                                  cfg.exponents, cfg.optimizer)
        result = {"sandwich": report.to_dict(), "error": error.to_dict()}
        row = dict(report.result.to_dict(), ach_exponent=report.ach_exponent,
                   conv_exponent=report.conv_exponent, err_exponent=error.exponent,
                   upper=report.upper, lower=report.lower,
                   verdict="pass" if report.passed else "fail")
        return context.emit(self.name, _params(context, self), {"channel": provenance}, result,
                            [row], f"wiretap sandwich {'pass' if report.passed else 'FAIL'}.")


# ═════════════════════════════════════════════════════════════════
#  VERIFICATION AND TABLES
# ═════════════════════════════════════════════════════════════════

class VerifyCommand(Command):
    """
    Run the verification battery; exits 1 when any check fails.

    Syntax:
        verify [--checks trace_inequality,helstrom_attainment] [--trials 1000] [--seed 3]
    """
    name = "verify"
    options = frozenset({"checks", "trials"})

    def execute(self, context: RunContext) -> CommandResult:
        cfg = context.config
        checks = context.options.get("checks")
        selection = [c.strip() for c in str(checks).split(",") if c.strip()] if checks else None
        trials = context.get("trials", ValueType.INT)
        reports = run_battery(selection, trials, cfg.seed, cfg.verifier, cfg.optimizer,
                              max_workers=cfg.max_workers)
        rows = [r.to_dict() for r in reports]
        csv_rows = [dict(r, failures="; ".join(r["failures"])) for r in rows]
        result = context.emit(self.name, _params(context, self), {"checks": list(CHECK_NAMES)},
                              rows, csv_rows)
        failed = [r.name for r in reports if not r.passed]
        if failed:
            result.success = False
            result.exit_code = 1
            result.message = f"{len(failed)} check(s) failed: {', '.join(failed)}."
        else:
            result.message = f"all {len(reports)} check(s) passed."
        return result


class ModerateCommand(Command):
    """
    Moderate-deviation tables.  Entropy-accumulation tables stay in nats, like ``ea``.

    Syntax:
        moderate --fixture classical-quarter --kind pa_conv --t 0.3 --n 10,100,1000
        moderate --kind ea_conv --f 1 --V 2.5 --prob 0.1 --t 0.3 --n 100,10000
    """
    name = "moderate"
    options = frozenset({"kind", "t", "n", "f", "V", "prob"})

    def execute(self, context: RunContext) -> CommandResult:
        kind = str(context.require("kind")).lower()
        schedule = ModerateSchedule(context.require("t", ValueType.FLOAT),
                                    tuple(context.require("n", ValueType.INT_LIST)))
        cfg = context.config
        if kind in ("ea_ach", "ea_conv"):
            table = moderate_ea_table(context.require("f", ValueType.FLOAT),
                                      context.require("V", ValueType.FLOAT),
                                      context.require("prob", ValueType.FLOAT),
                                      schedule, side=kind[3:])
            inputs: Dict[str, Any] = {}
            units: Optional[Units] = Units.NATS
        else:
            state, provenance = context.load_state()
            table = moderate_table(state, TypeValidator.parse_enum(kind, ModerateKind, "moderate kind"),
                                   schedule, cfg.exponents, cfg.optimizer, cfg.max_workers)
            inputs = {"state": provenance}
            units = None
        data = table.to_dict()
        return context.emit(self.name, _params(context, self), inputs, data, data["rows"],
                            f"{kind}: {len(data['rows'])} row(s), limit {table.limit:.6g}.",
                            units=units)


class HelpCommand(Command):
    """
    Display available CLI commands.

    Syntax:
        help
    """
    name = "help"

    def execute(self, context: RunContext) -> CommandResult:
        help_text = f"""
Usage: privamp <command> [options]
───────────────────────────────────────────────────────
  entropy   --alpha A,... [--kinds {','.join(_ENTROPY_KINDS)}]
      Rényi conditional entropies / mutual informations of the state.

  exponent  --family pa --side ach|conv|lhl|length --rate R,... [--n N,...] [--eps E]
  exponent  --family wiretap --side ach|conv|err --rate R,... [--n N,...]
  exponent  --family ea --side ach|conv --f F --V V --prob P --rate R,... [--n N,...]
      Exponents and bounds. Wiretap rates are log L (log ML for err).

  simulate  --u U --v V [--n N,...] [--mode exact|mc|sandwich] [--trials T] [--breakdown]
      ε_PA over the affine hash family, or the bound sandwich.

  wiretap   --channel PATH|NAME | --kraus PATH --inputs PATH
            --M M --L L [--prior p,...] [--mode exact|mc] [--trials T]
      Wiretap exponents and the d₁ sandwich. Bundled channels:
      {', '.join(WIRETAP_FIXTURES)}.

  verify    [--checks {','.join(CHECK_NAMES)}] [--trials T]
      Numeric verification battery; exit status 1 on failure.

  moderate  --kind pa_ach|pa_conv|wt_ach|wt_conv|ea_ach|ea_conv --t T --n N,...
      Moderate-deviation table (ea kinds take --f --V --prob).

  ea        --f F --V V --prob P --rate R,... [--n N,...] [--side ach|conv]
      Entropy-accumulation bounds.

Global options:
  --state PATH | --fixture {'|'.join(FIXTURES)}
  --out PATH  --format json|csv  --units nats|bits  --seed N  --threads N
  --log-level DEBUG|INFO|WARNING|ERROR
───────────────────────────────────────────────────────
""".strip()
        return CommandResult(True, "help", 0, help_text + "\n")


COMMANDS: Dict[str, type] = {
    cls.name: cls for cls in (EntropyCommand, ExponentCommand, SimulateCommand, WiretapCommand,
                              VerifyCommand, ModerateCommand, EACommand, HelpCommand)
}
