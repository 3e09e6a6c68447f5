//! Dotted parameter paths shared by scenario files, sensitivity designs,
//! calibration and matching.
//!
//! Grammar (mirroring the reference table names):
//!   HR | p_EX
//!   chambers.{LA|LV|RA|RV}.{Ea|Ep|TC|TR|tC|V0}
//!   valves.{MV|AV|TV|PV}.{Rmin|Rmax}
//!   valves.{Rmin|Rmax}                  broadcast over the four valves
//!   circ.{SYS|PUL}.{AR|VEN}.{R|L|C}
//!   capillary.{R_C_SYS|C_C_SYS|R_C_PUL|C_C_PUL|R_SH|C_SH}

use crate::error::{Error, Result};
use crate::model::params::{Branch, Chamber, ParameterSet, Valve, Variant};

fn chamber_by_label(label: &str) -> Option<Chamber> {
    Chamber::ALL.into_iter().find(|c| c.label() == label)
}

fn valve_by_label(label: &str) -> Option<Valve> {
    Valve::ALL.into_iter().find(|v| v.label() == label)
}

impl ParameterSet {
    /// Reads the value at a parameter path. Broadcast paths (`valves.Rmin`,
    /// `valves.Rmax`) require the four valves to agree.
    pub fn get_path(&self, path: &str) -> Result<f64> {
        let parts: Vec<&str> = path.split('.').collect();
        let unknown = || Error::UnknownParameter(path.to_string());
        match parts.as_slice() {
            ["HR"] => Ok(self.heart_rate),
            ["p_EX"] => Ok(self.external_pressure),
            ["chambers", ch, field] => {
                let c = chamber_by_label(ch).ok_or_else(unknown)?;
                let ch = &self.chambers[c];
                match *field {
                    "Ea" => Ok(ch.active_elastance),
                    "Ep" => Ok(ch.passive_elastance),
                    "TC" => Ok(ch.contraction_duration),
                    "TR" => Ok(ch.relaxation_duration),
                    "tC" => Ok(ch.contraction_onset),
                    "V0" => Ok(ch.resting_volume),
                    _ => Err(unknown()),
                }
            }
            ["valves", v, field] => {
                let valve = valve_by_label(v).ok_or_else(unknown)?;
                match *field {
                    "Rmin" => Ok(self.valves[valve].r_min),
                    "Rmax" => Ok(self.valves[valve].r_max),
                    _ => Err(unknown()),
                }
            }
            ["valves", field @ ("Rmin" | "Rmax")] => {
                let pick = |v: Valve| match *field {
                    "Rmin" => self.valves[v].r_min,
                    _ => self.valves[v].r_max,
                };
                let first = pick(Valve::Mitral);
                if Valve::ALL.into_iter().any(|v| pick(v) != first) {
                    return Err(Error::InvalidParameter(format!(
                        "broadcast path `{path}` read with differing per-valve values"
                    )));
                }
                Ok(first)
            }
            ["circ", side @ ("SYS" | "PUL"), pos @ ("AR" | "VEN"), field] => {
                let branch = match (*side, *pos) {
                    ("SYS", "AR") => Branch::SystemicArterial,
                    ("SYS", "VEN") => Branch::SystemicVenous,
                    ("PUL", "AR") => Branch::PulmonaryArterial,
                    _ => Branch::PulmonaryVenous,
                };
                let b = &self.circulation[branch];
                match *field {
                    "R" => Ok(b.resistance),
                    "L" => Ok(b.inductance),
                    "C" => Ok(b.capacitance),
                    _ => Err(unknown()),
                }
            }
            ["capillary", field] => {
                let cap = self.capillary.as_ref().ok_or_else(|| {
                    Error::VariantMismatch(format!(
                        "path `{path}` requires variant C (base is {})",
                        self.variant
                    ))
                })?;
                match *field {
                    "R_C_SYS" => Ok(cap.r_sys),
                    "C_C_SYS" => Ok(cap.c_sys),
                    "R_C_PUL" => Ok(cap.r_pul),
                    "C_C_PUL" => Ok(cap.c_pul),
                    "R_SH" => Ok(cap.r_shunt),
                    "C_SH" => Ok(cap.c_shunt),
                    _ => Err(unknown()),
                }
            }
            _ => Err(unknown()),
        }
    }

    /// Writes the value at a parameter path.
    pub fn set_path(&mut self, path: &str, value: f64) -> Result<()> {
        let parts: Vec<&str> = path.split('.').collect();
        let unknown = || Error::UnknownParameter(path.to_string());
        match parts.as_slice() {
            ["HR"] => self.heart_rate = value,
            ["p_EX"] => self.external_pressure = value,
            ["chambers", ch, field] => {
                let c = chamber_by_label(ch).ok_or_else(unknown)?;
                let ch = &mut self.chambers[c];
                match *field {
                    "Ea" => ch.active_elastance = value,
                    "Ep" => ch.passive_elastance = value,
                    "TC" => ch.contraction_duration = value,
                    "TR" => ch.relaxation_duration = value,
                    "tC" => ch.contraction_onset = value,
                    "V0" => ch.resting_volume = value,
                    _ => return Err(unknown()),
                }
            }
            ["valves", v, field] => {
                let valve = valve_by_label(v).ok_or_else(unknown)?;
                match *field {
                    "Rmin" => self.valves[valve].r_min = value,
                    "Rmax" => self.valves[valve].r_max = value,
                    _ => return Err(unknown()),
                }
            }
            ["valves", field @ ("Rmin" | "Rmax")] => {
                for v in Valve::ALL {
                    match *field {
                        "Rmin" => self.valves[v].r_min = value,
                        _ => self.valves[v].r_max = value,
                    }
                }
            }
            ["circ", side @ ("SYS" | "PUL"), pos @ ("AR" | "VEN"), field] => {
                let branch = match (*side, *pos) {
                    ("SYS", "AR") => Branch::SystemicArterial,
                    ("SYS", "VEN") => Branch::SystemicVenous,
                    ("PUL", "AR") => Branch::PulmonaryArterial,
                    _ => Branch::PulmonaryVenous,
                };
                let b = &mut self.circulation[branch];
                match *field {
                    "R" => b.resistance = value,
                    "L" => b.inductance = value,
                    "C" => b.capacitance = value,
                    _ => return Err(unknown()),
                }
            }
            ["capillary", field] => {
                let cap = self.capillary.as_mut().ok_or_else(|| {
                    Error::VariantMismatch(format!(
                        "path `{path}` requires variant C (base is {})",
                        self.variant
                    ))
                })?;
                match *field {
                    "R_C_SYS" => cap.r_sys = value,
                    "C_C_SYS" => cap.c_sys = value,
                    "R_C_PUL" => cap.r_pul = value,
                    "C_C_PUL" => cap.c_pul = value,
                    "R_SH" => cap.r_shunt = value,
                    "C_SH" => cap.c_shunt = value,
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Multiplies the value at a path by `factor`.
    pub fn scale_path(&mut self, path: &str, factor: f64) -> Result<()> {
        let current = self.get_path(path)?;
        self.set_path(path, current * factor)
    }

    /// The analysis parameter names of a variant: chamber elastances and
    /// resting volumes, the shared valve resistances, and all RLC components
    /// (plus the capillary block for variant C). Heart rate and cycle timings
    /// are excluded. 26 paths for NC, 32 for C.
    pub fn analysis_paths(variant: Variant) -> Vec<String> {
        let mut out = Vec::new();
        for field in ["Ea", "Ep", "V0"] {
            for c in Chamber::ALL {
                out.push(format!("chambers.{}.{field}", c.label()));
            }
        }
        out.push("valves.Rmin".to_string());
        out.push("valves.Rmax".to_string());
        for side in ["SYS", "PUL"] {
            for pos in ["AR", "VEN"] {
                for field in ["R", "L", "C"] {
                    out.push(format!("circ.{side}.{pos}.{field}"));
                }
            }
        }
        if variant == Variant::Capillary {
            for field in ["R_C_SYS", "C_C_SYS", "R_C_PUL", "C_C_PUL", "R_SH", "C_SH"] {
                out.push(format!("capillary.{field}"));
            }
        }
        out
    }
}
