//! Reading and writing instances.
//!
//! Three CSV tables (`rooms.csv`, `disciplines.csv`, `timeslots.csv`) plus an
//! optional `options.txt` of `key = value` lines, or a single `instance.json`.
//! Lines starting with `#` are comments in every text format.

use crate::error::{Error, ParseError};
use crate::instance::{Discipline, Instance, InstanceOptions, Room, Timeslot};
use serde::Deserialize;
use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

pub const ROOMS_FILE: &str = "rooms.csv";
pub const DISCIPLINES_FILE: &str = "disciplines.csv";
pub const TIMESLOTS_FILE: &str = "timeslots.csv";
pub const OPTIONS_FILE: &str = "options.txt";

const ROOM_COLUMNS: &[&str] = &["id", "block", "kind", "capacity", "floor"];
const DISCIPLINE_COLUMNS: &[&str] = &["id", "frequency", "pcd", "enrollment", "eligible_rooms"];
const TIMESLOT_COLUMNS: &[&str] = &["id", "day", "order"];

#[derive(Debug, Clone)]
pub struct Parsed {
    pub instance: Instance,
    pub warnings: Vec<String>,
}

struct Table {
    name: &'static str,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn read(
        name: &'static str,
        text: &str,
        known: &[&str],
        required: &[&str],
        warnings: &mut Vec<String>,
    ) -> Result<Table, ParseError> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| ParseError::new(name, None, e.to_string()))?
            .clone();
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if known.contains(&h) {
                columns.insert(h.to_string(), i);
            } else {
                warnings.push(format!("{name}: ignoring unknown column '{h}'"));
            }
        }
        for req in required {
            if !columns.contains_key(*req) {
                return Err(ParseError::new(
                    name,
                    None,
                    format!("missing required column '{req}'"),
                ));
            }
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line());
                ParseError::new(name, line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, rec));
        }
        Ok(Table {
            name,
            columns,
            rows,
        })
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, col: &str) -> Option<&'r str> {
        self.columns
            .get(col)
            .and_then(|&i| rec.get(i))
            .filter(|s| !s.is_empty())
    }

    fn required<'r>(&self, line: u64, rec: &'r csv::StringRecord, col: &str) -> Result<&'r str, ParseError> {
        self.get(rec, col)
            .ok_or_else(|| ParseError::new(self.name, Some(line), format!("empty '{col}'")))
    }

    fn number<T: std::str::FromStr>(
        &self,
        line: u64,
        rec: &csv::StringRecord,
        col: &str,
    ) -> Result<Option<T>, ParseError> {
        match self.get(rec, col) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| {
                ParseError::new(self.name, Some(line), format!("'{col}' is not a valid number: '{s}'"))
            }),
        }
    }
}

fn parse_flag(table: &str, line: Option<u64>, s: &str) -> Result<bool, ParseError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "0" | "false" | "no" => Ok(false),
        "1" | "true" | "yes" => Ok(true),
        other => Err(ParseError::new(table, line, format!("expected 0/1, got '{other}'"))),
    }
}

fn parse_rooms(text: &str, warnings: &mut Vec<String>) -> Result<Vec<Room>, ParseError> {
    let t = Table::read(ROOMS_FILE, text, ROOM_COLUMNS, &["id", "capacity", "floor"], warnings)?;
    let mut rooms = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let line = *line;
        let floor: i64 = t.number(line, rec, "floor")?.ok_or_else(|| {
            ParseError::new(ROOMS_FILE, Some(line), "empty 'floor'".to_string())
        })?;
        if floor < 0 {
            return Err(ParseError::new(
                ROOMS_FILE,
                Some(line),
                format!("floor must be non-negative, got {floor}"),
            ));
        }
        rooms.push(Room {
            id: t.required(line, rec, "id")?.to_string(),
            block: t.get(rec, "block").unwrap_or_default().to_string(),
            kind: t.get(rec, "kind").unwrap_or_default().to_string(),
            capacity: t.number(line, rec, "capacity")?.ok_or_else(|| {
                ParseError::new(ROOMS_FILE, Some(line), "empty 'capacity'".to_string())
            })?,
            floor: floor as u32,
        });
    }
    Ok(rooms)
}

fn parse_disciplines(text: &str, warnings: &mut Vec<String>) -> Result<Vec<Discipline>, ParseError> {
    let t = Table::read(DISCIPLINES_FILE, text, DISCIPLINE_COLUMNS, &["id", "pcd"], warnings)?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let line = *line;
        let eligible = t.get(rec, "eligible_rooms").map(|s| {
            s.split(';')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(str::to_string)
                .collect::<Vec<_>>()
        });
        out.push(Discipline {
            id: t.required(line, rec, "id")?.to_string(),
            frequency: t.number(line, rec, "frequency")?.unwrap_or(crate::instance::DEFAULT_FREQUENCY),
            pcd: parse_flag(DISCIPLINES_FILE, Some(line), t.get(rec, "pcd").unwrap_or("0"))?,
            enrollment: t.number(line, rec, "enrollment")?,
            eligible_rooms: eligible.filter(|v| !v.is_empty()),
        });
    }
    Ok(out)
}

fn parse_timeslots(text: &str, warnings: &mut Vec<String>) -> Result<Vec<Timeslot>, ParseError> {
    let t = Table::read(TIMESLOTS_FILE, text, TIMESLOT_COLUMNS, &["id"], warnings)?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (row, (line, rec)) in t.rows.iter().enumerate() {
        out.push(Timeslot {
            id: t.required(*line, rec, "id")?.to_string(),
            day: t.get(rec, "day").map(str::to_string),
            order: t.number(*line, rec, "order")?.unwrap_or(row as i64),
        });
    }
    Ok(out)
}

/// Parses `key = value` lines. Unknown keys produce warnings.
pub fn parse_options(text: &str, warnings: &mut Vec<String>) -> Result<InstanceOptions, ParseError> {
    let mut opts = InstanceOptions::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = Some(i as u64 + 1);
        let (key, value) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| ParseError::new(OPTIONS_FILE, lineno, format!("expected key = value, got '{line}'")))?;
        let value = parse_flag(OPTIONS_FILE, lineno, value)?;
        match key.trim() {
            "enforce_capacity" => opts.enforce_capacity = value,
            "same_room_per_discipline" => opts.same_room_per_discipline = value,
            "distinct_days" => opts.distinct_days = value,
            other => warnings.push(format!("{OPTIONS_FILE}: ignoring unknown key '{other}'")),
        }
    }
    Ok(opts)
}

/// Rejects duplicate ids and eligibility lists naming unknown rooms.
fn cross_reference(inst: &Instance) -> Result<(), ParseError> {
    fn unique<'a>(file: &'static str, ids: impl Iterator<Item = &'a str>) -> Result<(), ParseError> {
        let mut seen = HashSet::new();
        for (row, id) in ids.enumerate() {
            if !seen.insert(id) {
                return Err(ParseError::new(
                    file,
                    None,
                    format!("duplicate id '{id}' in data row {}", row + 1),
                ));
            }
        }
        Ok(())
    }
    unique(ROOMS_FILE, inst.rooms.iter().map(|r| r.id.as_str()))?;
    unique(DISCIPLINES_FILE, inst.disciplines.iter().map(|d| d.id.as_str()))?;
    unique(TIMESLOTS_FILE, inst.timeslots.iter().map(|t| t.id.as_str()))?;
    let rooms: HashSet<&str> = inst.rooms.iter().map(|r| r.id.as_str()).collect();
    for (row, d) in inst.disciplines.iter().enumerate() {
        for r in d.eligible_rooms.iter().flatten() {
            if !rooms.contains(r.as_str()) {
                return Err(ParseError::new(
                    DISCIPLINES_FILE,
                    None,
                    format!(
                        "discipline '{}' (data row {}) lists unknown eligible room '{r}'",
                        d.id,
                        row + 1
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Builds an instance from the three tables and the options text.
pub fn parse_instance(
    rooms_table: &str,
    disciplines_table: &str,
    timeslots_table: &str,
    options: &str,
) -> Result<Parsed, ParseError> {
    let mut warnings = Vec::new();
    let instance = Instance {
        rooms: parse_rooms(rooms_table, &mut warnings)?,
        disciplines: parse_disciplines(disciplines_table, &mut warnings)?,
        timeslots: parse_timeslots(timeslots_table, &mut warnings)?,
        options: parse_options(options, &mut warnings)?,
    };
    cross_reference(&instance)?;
    Ok(Parsed { instance, warnings })
}

pub fn parse_instance_json(text: &str) -> Result<Parsed, ParseError> {
    // Comment lines are allowed in every format, JSON included.
    let stripped: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut de = serde_json::Deserializer::from_str(&stripped);
    let instance = Instance::deserialize(&mut de)
        .map_err(|e| ParseError::new("instance.json", Some(e.line() as u64), e.to_string()))?;
    cross_reference(&instance)?;
    Ok(Parsed {
        instance,
        warnings: Vec::new(),
    })
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads either a JSON document or a directory holding the CSV tables.
pub fn load_instance(path: &Path) -> Result<Parsed, Error> {
    if path.is_dir() {
        let options_path = path.join(OPTIONS_FILE);
        let options = if options_path.exists() {
            read(&options_path)?
        } else {
            String::new()
        };
        Ok(parse_instance(
            &read(&path.join(ROOMS_FILE))?,
            &read(&path.join(DISCIPLINES_FILE))?,
            &read(&path.join(TIMESLOTS_FILE))?,
            &options,
        )?)
    } else {
        Ok(parse_instance_json(&read(path)?)?)
    }
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// CSV tables and options text, in the order `parse_instance` expects them.
pub struct InstanceTables {
    pub rooms: String,
    pub disciplines: String,
    pub timeslots: String,
    pub options: String,
}

pub fn to_tables(inst: &Instance) -> InstanceTables {
    let rooms = csv_string(
        ROOM_COLUMNS,
        inst.rooms.iter().map(|r| {
            vec![
                r.id.clone(),
                r.block.clone(),
                r.kind.clone(),
                r.capacity.to_string(),
                r.floor.to_string(),
            ]
        }),
    );
    let disciplines = csv_string(
        DISCIPLINE_COLUMNS,
        inst.disciplines.iter().map(|d| {
            vec![
                d.id.clone(),
                d.frequency.to_string(),
                u8::from(d.pcd).to_string(),
                d.enrollment.map(|e| e.to_string()).unwrap_or_default(),
                d.eligible_rooms.as_ref().map(|v| v.join(";")).unwrap_or_default(),
            ]
        }),
    );
    let timeslots = csv_string(
        TIMESLOT_COLUMNS,
        inst.timeslots.iter().map(|t| {
            vec![
                t.id.clone(),
                t.day.clone().unwrap_or_default(),
                t.order.to_string(),
            ]
        }),
    );
    let o = &inst.options;
    let options = format!(
        "enforce_capacity = {}\nsame_room_per_discipline = {}\ndistinct_days = {}\n",
        o.enforce_capacity, o.same_room_per_discipline, o.distinct_days
    );
    InstanceTables {
        rooms,
        disciplines,
        timeslots,
        options,
    }
}

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SIX_ROOMS: &str = "\
# Table of sample rooms
id,block,kind,capacity,floor
101,O,conventional,40,0
203,B,study,15,1
204,B,conventional,45,1
304,C,programming lab,25,2
403,E,physics lab,20,3
504,E,conventional,40,4
";

    #[test]
    fn six_room_fixture() {
        let p = parse_instance(SIX_ROOMS, "id,pcd\n", "id\nt1\n", "").unwrap();
        let floors: Vec<u32> = p.instance.rooms.iter().map(|r| r.floor).collect();
        let caps: Vec<u32> = p.instance.rooms.iter().map(|r| r.capacity).collect();
        assert_eq!(floors, vec![0, 1, 1, 2, 3, 4]);
        assert_eq!(caps, vec![40, 15, 45, 25, 20, 40]);
        assert!(p.instance.disciplines.is_empty());
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn eligible_lab_only() {
        let p = parse_instance(
            SIX_ROOMS,
            "id,frequency,pcd,enrollment,eligible_rooms\nalgo,2,1,,304\nintro,2,0,30,\n",
            "id,day,order\nt1,mon,1\nt2,tue,1\n",
            "",
        )
        .unwrap();
        let algo = &p.instance.disciplines[0];
        assert_eq!(algo.eligible_rooms.as_deref(), Some(&["304".to_string()][..]));
        let eligible = p.instance.eligible_rooms();
        assert_eq!(eligible[0], vec![3]);
        assert_eq!(p.instance.rooms[eligible[0][0]].kind, "programming lab");
        assert_eq!(eligible[1].len(), 6);
        assert_eq!(p.instance.disciplines[1].enrollment, Some(30));
    }

    #[test]
    fn defaults_and_unknown_columns() {
        let p = parse_instance(
            "id,capacity,floor,color\nr,10,0,blue\n",
            "id,pcd\nd,0\n",
            "id\na\nb\n",
            "# comment\ndistinct_days = false\nmystery = 1\n",
        )
        .unwrap();
        assert_eq!(p.instance.disciplines[0].frequency, 2);
        assert_eq!(p.instance.timeslots[1].order, 1);
        assert_eq!(p.warnings.len(), 2);
    }

    #[test]
    fn duplicate_id_names_row() {
        let err = parse_instance(SIX_ROOMS, "id,pcd\nd,0\nd,1\n", "id\nt\n", "").unwrap_err();
        assert!(err.to_string().contains("duplicate id 'd' in data row 2"), "{err}");
    }

    #[test]
    fn dangling_reference() {
        let err = parse_instance(SIX_ROOMS, "id,pcd,eligible_rooms\nd,0,999\n", "id\nt\n", "")
            .unwrap_err();
        assert!(err.to_string().contains("unknown eligible room '999'"), "{err}");
    }

    #[test]
    fn missing_column() {
        let err = parse_instance("id,block\nr,O\n", "id,pcd\n", "id\n", "").unwrap_err();
        assert!(err.to_string().contains("missing required column 'capacity'"), "{err}");
    }

    #[test]
    fn negative_floor() {
        let err = parse_instance("id,capacity,floor\nr,10,-1\n", "id,pcd\n", "id\n", "").unwrap_err();
        assert!(err.to_string().contains("non-negative"), "{err}");
    }

    #[test]
    fn json_document() {
        let text = r#"
# comment line
{
  "disciplines": [{"id": "d", "pcd": 1, "eligible_rooms": ["r"]}],
  "timeslots": [{"id": "t1", "day": "mon", "order": 1}, {"id": "t2", "order": 2}],
  "rooms": [{"id": "r", "block": "O", "floor": 0, "capacity": 10, "kind": "lab"}],
  "options": {"distinct_days": false}
}"#;
        let p = parse_instance_json(text).unwrap();
        assert!(p.instance.disciplines[0].pcd);
        assert_eq!(p.instance.disciplines[0].frequency, 2);
        assert_eq!(p.instance.timeslots[1].day, None);
        assert!(to_json(&p.instance).contains("\"pcd\": 1"));
    }
}
