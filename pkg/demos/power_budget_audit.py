#!/usr/bin/env python3
"""Walkthrough: can a 40 dBm probe still flip the modulator after the optics?

Builds two transmitter output chains from the bundled reference component
library -- a typical one (variable attenuator + WDM filter) and a hardened
one with an isolator and a scattering attenuator added -- then computes the
attacker-best/worst power envelopes, compares them against the 3 nW attack
threshold, and prints per-band verdicts.

Writes demo_output/budget_typical.csv and demo_output/budget_hardened.csv.
"""

import pathlib

from ipaudit import Chain, Slot, assess_ipa, convert_power, reference_library

OUT = pathlib.Path(__file__).resolve().parent.parent / "demo_output"


def audit(name: str, chain: Chain, library) -> None:
    report = assess_ipa(chain, library)
    print(f"--- {name} (input {chain.input_power_dbm} dBm) ---")
    print(f"  attacker-best power : {report.p_max_dbm.max():7.2f} dBm peak")
    print(f"  attacker-worst power: {report.p_min_dbm.max():7.2f} dBm peak")
    for assessment in report.max_power:
        print(f"  threshold {assessment.threshold.label()} "
              f"({assessment.threshold_dbm:.2f} dBm): {assessment.verdict}")
        for band in assessment.bands:
            span = f"{band.lo_nm:.0f}-{band.hi_nm:.0f} nm"
            quality = "floored data only" if band.floored_only else "measured data"
            print(f"    band {span:>11}  severity={band.severity}  [{quality}]")
    path = OUT / f"budget_{name}.csv"
    rows = zip(report.wavelengths_nm, report.p_min_dbm, report.p_max_dbm)
    thr = min(a.threshold_dbm for a in report.max_power)
    path.write_text(
        "wavelength_nm,p_min_dbm,p_max_dbm,threshold_dbm\n"
        + "\n".join(f"{w},{lo},{hi},{thr}" for w, lo, hi in rows)
        + "\n"
    )
    print(f"  -> {path.name}\n")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    library = reference_library()
    print(f"reference library: {len(library)} components")
    print(f"attack threshold: 3 nW = {convert_power(3, 'nW', 'dBm'):.2f} dBm\n")

    typical = Chain((
        Slot((("voa-em", "0V"), ("voa-eo", "0V")), name="attenuator"),
        Slot((("cwdm1", "com->1550"), ("cwdm2", "com->1550"),
              ("cwdm3", "com->1550"), ("dwdm", "com->1550")), name="wdm"),
    ))
    audit("typical", typical, library)

    hardened = Chain((
        Slot((("voa-em", "0V"), ("voa-eo", "0V")), name="attenuator"),
        Slot((("cwdm1", "com->1550"),), name="wdm"),
        Slot((("isolator-dual", "backward"),), name="isolator"),
        Slot((("foa-scat-20db", "forward"),), name="fixed-attenuator"),
    ))
    audit("hardened", hardened, library)

    # Backward path through a watchdog tap: the circulator's adjacent-port
    # isolation never rose above the measurement floor, so any apparent
    # exceedance rests on "at least 50 dB" data.
    floor_limited = Chain((
        Slot((("circulator-4port", "port2->port1"),), name="circulator"),
        Slot((("foa-scat-20db", "forward"),), name="fixed-attenuator"),
        Slot((("cwdm1", "com->1550"),), name="wdm"),
    ))
    audit("floor_limited", floor_limited, library)

    print("takeaway: the typical chain leaves tens of dB of margin for the")
    print("attacker across the visible range; an isolator plus a scattering")
    print("attenuator closes the window outright; and when the only apparent")
    print("exceedance rests on floor-limited measurements the audit refuses")
    print("to call it either way (indeterminate).")


if __name__ == "__main__":
    main()
