"""JSON encodings shared by the CLI and by files on disk.

A matrix is ``{"rows": r, "cols": c, "entries": [[re, im], ...]}`` with the
entries flat in row-major order.  Composite objects nest these matrices under
the field names documented in each function.
"""

from __future__ import annotations

import numpy as np

from . import linalg as la
from .cpmap import CPMap, StinespringDilation
from .covariant import CharacterTable, FiniteGroup, UnitaryRep
from .frames import OperatorFrame, named_frame
from .frameorbit import FrameOrbitSpec, TeleportationScheme
from .instruments import Instrument, InstrumentDilation, Outcome


def matrix_to_json(m) -> dict:
    m = la.as_matrix(m)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if rows <= 0 or cols <= 0:
        raise ValueError("matrix dimensions must be positive")
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    if not np.all(np.isfinite(flat)):
        raise ValueError("matrix entries must be finite")
    return flat.reshape(rows, cols)


def cpmap_to_json(m: CPMap, include_choi: bool = False) -> dict:
    out: dict = {"d_in": m.d_in, "d_out": m.d_out}
    if m._kraus is not None:
        out["kraus"] = [matrix_to_json(k) for k in m.kraus]
    if include_choi or m._kraus is None:
        out["choi"] = matrix_to_json(m.choi)
    return out


def cpmap_from_json(obj) -> CPMap:
    d_in, d_out = int(obj["d_in"]), int(obj["d_out"])
    kraus = [matrix_from_json(k) for k in obj["kraus"]] if "kraus" in obj else None
    choi = matrix_from_json(obj["choi"]) if "choi" in obj else None
    return CPMap(d_in, d_out, kraus=kraus, choi=choi)


def instrument_to_json(instr: Instrument) -> dict:
    return {
        "d_in": instr.d_in,
        "d_out": instr.d_out,
        "outcomes": [
            {"label": o.label, "weight": o.weight, "density": cpmap_to_json(o.density)}
            for o in instr.outcomes
        ],
    }


def instrument_from_json(obj) -> Instrument:
    outcomes = [
        Outcome(str(o["label"]), float(o["weight"]), cpmap_from_json(o["density"]))
        for o in obj["outcomes"]
    ]
    instr = Instrument(outcomes)
    if instr.d_in != int(obj["d_in"]) or instr.d_out != int(obj["d_out"]):
        raise ValueError("instrument dimensions disagree with outcome densities")
    return instr


def frame_to_json(frame: OperatorFrame) -> dict:
    return {
        "d": frame.d,
        "members": [
            {"weight": mu, "op": matrix_to_json(a)} for mu, a in frame.members
        ],
    }


def frame_from_json(obj) -> OperatorFrame:
    if "name" in obj:
        return named_frame(str(obj["name"]), int(obj.get("d", 2)))
    members = [(float(m["weight"]), matrix_from_json(m["op"])) for m in obj["members"]]
    return OperatorFrame(members)


def frame_orbit_spec_to_json(spec: FrameOrbitSpec) -> dict:
    return {
        "frame": frame_to_json(spec.frame),
        "seed_map": cpmap_to_json(spec.seed_map),
        "conditional_channels": [cpmap_to_json(b) for b in spec.conditional_channels],
    }


def frame_orbit_spec_from_json(obj) -> FrameOrbitSpec:
    frame = frame_from_json(obj["frame"])
    seed = cpmap_from_json(obj["seed_map"])
    conditionals = obj["conditional_channels"]
    if conditionals == "unitary-from-frame":
        channels = [CPMap.from_unitary(a) for _, a in frame.members]
    else:
        channels = [cpmap_from_json(b) for b in conditionals]
    return FrameOrbitSpec(frame, channels, seed)


def stinespring_to_json(dil: StinespringDilation) -> dict:
    out = {"ancilla_dim": dil.ancilla_dim, "v": matrix_to_json(dil.v)}
    if dil.ancilla_embedding is not None:
        out["ancilla_embedding"] = matrix_to_json(dil.ancilla_embedding)
    return out


def stinespring_from_json(obj) -> StinespringDilation:
    emb = obj.get("ancilla_embedding")
    return StinespringDilation(
        ancilla_dim=int(obj["ancilla_dim"]),
        v=matrix_from_json(obj["v"]),
        ancilla_embedding=None if emb is None else matrix_from_json(emb),
    )


def instrument_dilation_to_json(dil: InstrumentDilation) -> dict:
    out = {
        "ancilla_dim": dil.ancilla_dim,
        "v": matrix_to_json(dil.v),
        "q": [matrix_to_json(q) for q in dil.q],
    }
    if dil.ancilla_embedding is not None:
        out["ancilla_embedding"] = matrix_to_json(dil.ancilla_embedding)
    if dil.labels is not None:
        out["labels"] = list(dil.labels)
    return out


def instrument_dilation_from_json(obj) -> InstrumentDilation:
    emb = obj.get("ancilla_embedding")
    return InstrumentDilation(
        ancilla_dim=int(obj["ancilla_dim"]),
        v=matrix_from_json(obj["v"]),
        q=[matrix_from_json(q) for q in obj["q"]],
        ancilla_embedding=None if emb is None else matrix_from_json(emb),
        labels=list(obj["labels"]) if "labels" in obj else None,
    )


def scheme_to_json(scheme: TeleportationScheme) -> dict:
    return {
        "kind": scheme.kind,
        "ordering": scheme.ordering,
        "d_bob": scheme.d_bob,
        "d_alice": scheme.d_alice,
        "d_in": scheme.d_in,
        "weights": list(scheme.weights),
        "resource_state": matrix_to_json(scheme.resource_state),
        "joint_povm": [matrix_to_json(z) for z in scheme.joint_povm],
        "conditional_channels": [cpmap_to_json(b) for b in scheme.conditional_channels],
        "support_warnings": list(scheme.support_warnings),
    }


def scheme_from_json(obj) -> TeleportationScheme:
    return TeleportationScheme(
        kind=str(obj["kind"]),
        resource_state=matrix_from_json(obj["resource_state"]),
        joint_povm=[matrix_from_json(z) for z in obj["joint_povm"]],
        conditional_channels=[cpmap_from_json(b) for b in obj["conditional_channels"]],
        weights=[float(w) for w in obj["weights"]],
        d_bob=int(obj["d_bob"]),
        d_alice=int(obj["d_alice"]),
        d_in=int(obj["d_in"]),
        ordering=str(obj.get("ordering", "bob,alice,input")),
        support_warnings=[int(i) for i in obj.get("support_warnings", [])],
    )


def group_to_json(group: FiniteGroup) -> dict:
    return {"order": group.order, "cayley": [[int(x) for x in row] for row in group.cayley]}


def group_from_json(obj) -> FiniteGroup:
    return FiniteGroup(obj["cayley"])


def rep_to_json(rep: UnitaryRep) -> dict:
    return {
        "group": group_to_json(rep.group),
        "matrices": [matrix_to_json(u) for u in rep.matrices],
        "projective": rep.projective,
    }


def rep_from_json(obj) -> UnitaryRep:
    group = group_from_json(obj["group"])
    mats = [matrix_from_json(u) for u in obj["matrices"]]
    return UnitaryRep(group, mats, projective=bool(obj.get("projective", False)))


def characters_to_json(chars: CharacterTable) -> dict:
    return {
        "irreps": [
            {
                "label": label,
                "dim": dim,
                "values": [[float(v.real), float(v.imag)] for v in values],
            }
            for label, dim, values in chars.irreps
        ]
    }


def characters_from_json(obj, group: FiniteGroup) -> CharacterTable:
    irreps = [
        (str(i["label"]), int(i["dim"]), [complex(re, im) for re, im in i["values"]])
        for i in obj["irreps"]
    ]
    return CharacterTable(group, irreps)
