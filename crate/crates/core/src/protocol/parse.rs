use super::{Action, Edit, ImageBlock, Instruction, InstructionKind, NewRelationship, ParseError};
use crate::model::{BoundingBox, NamedVrType};

const OPEN_QUOTES: &[char] = &['`', '\'', '"', '\u{2018}', '\u{201C}'];
const CLOSE_QUOTES: &[char] = &['\'', '"', '`', '\u{2019}', '\u{201D}'];

fn err(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError {
        line,
        reason: reason.into(),
    }
}

/// Parses raw bytes, rejecting invalid UTF-8 with the line it occurs on.
pub fn parse_script_bytes(bytes: &[u8]) -> Result<Vec<ImageBlock>, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_script(text),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = 1 + valid.iter().filter(|&&b| b == b'\n').count();
            Err(err(line, "invalid UTF-8"))
        }
    }
}

pub fn parse_script(text: &str) -> Result<Vec<ImageBlock>, ParseError> {
    let text = text.strip_prefix('\u{FEFF}').unwrap_or(text);
    let mut blocks: Vec<ImageBlock> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }

        let mut fields: Vec<&str> = trimmed.split(';').map(str::trim).collect();
        // One trailing `;` is tolerated on every line.
        if fields.len() > 1 && fields.last().is_some_and(|f| f.is_empty()) {
            fields.pop();
        }

        let kind = InstructionKind::from_mnemonic(fields[0])
            .ok_or_else(|| err(line, format!("unknown mnemonic {:?}", fields[0])))?;

        if kind == InstructionKind::ImName {
            blocks.push(parse_imname(&fields, line)?);
            continue;
        }
        if kind == InstructionKind::RimXxx {
            return Err(err(
                line,
                "rimxxx must follow the filename on an imname line",
            ));
        }

        let block = blocks
            .last_mut()
            .ok_or_else(|| err(line, format!("{kind} before any imname line")))?;
        if block.remove_image {
            return Err(err(
                line,
                format!(
                    "{kind} inside a block that removes image {}",
                    block.filename
                ),
            ));
        }
        let action = parse_action(kind, &fields, line)?;
        block.instructions.push(Instruction { line, action });
    }
    Ok(blocks)
}

fn expect_fields(
    kind: InstructionKind,
    fields: &[&str],
    want: usize,
    line: usize,
) -> Result<(), ParseError> {
    if fields.len() == want {
        Ok(())
    } else {
        Err(err(
            line,
            format!(
                "{kind} takes {} fields, found {}",
                want - 1,
                fields.len() - 1
            ),
        ))
    }
}

fn parse_imname(fields: &[&str], line: usize) -> Result<ImageBlock, ParseError> {
    if !(2..=3).contains(&fields.len()) {
        return Err(err(
            line,
            "imname takes a filename and an optional rimxxx marker",
        ));
    }
    let filename = fields[1];
    if filename.is_empty() {
        return Err(err(line, "empty image filename"));
    }
    let remove_image = match fields.get(2) {
        None => false,
        Some(f) if InstructionKind::from_mnemonic(f) == Some(InstructionKind::RimXxx) => true,
        Some(f) => {
            return Err(err(
                line,
                format!("expected rimxxx after filename, found {f:?}"),
            ))
        }
    };
    Ok(ImageBlock {
        filename: filename.to_string(),
        remove_image,
        instructions: Vec::new(),
        line,
    })
}

fn parse_action(kind: InstructionKind, fields: &[&str], line: usize) -> Result<Action, ParseError> {
    use InstructionKind::*;
    match kind {
        CvrSoc | CvrSbb | CvrOoc | CvrObb | CvrPxx => {
            expect_fields(kind, fields, 4, line)?;
            let index = parse_index(fields[1], line)?;
            let expected = parse_tuple(fields[2], line)?;
            let edit = match kind {
                CvrSoc => Edit::SubjectClass(parse_name(fields[3], line)?),
                CvrOoc => Edit::ObjectClass(parse_name(fields[3], line)?),
                CvrPxx => Edit::Predicate(parse_name(fields[3], line)?),
                CvrSbb => Edit::SubjectBbox(parse_bbox(fields[3], line)?),
                _ => Edit::ObjectBbox(parse_bbox(fields[3], line)?),
            };
            Ok(Action::Change {
                index,
                expected,
                edit,
            })
        }
        RvrXxx => {
            expect_fields(kind, fields, 3, line)?;
            Ok(Action::Remove {
                index: parse_index(fields[1], line)?,
                expected: parse_tuple(fields[2], line)?,
            })
        }
        AvrXxx => {
            expect_fields(kind, fields, 6, line)?;
            Ok(Action::Add(NewRelationship {
                subject_class: parse_name(fields[1], line)?,
                subject_bbox: parse_bbox(fields[2], line)?,
                predicate: parse_name(fields[3], line)?,
                object_class: parse_name(fields[4], line)?,
                object_bbox: parse_bbox(fields[5], line)?,
            }))
        }
        ImName | RimXxx => unreachable!("handled by the caller"),
    }
}

fn parse_index(s: &str, line: usize) -> Result<usize, ParseError> {
    s.parse::<usize>()
        .map_err(|_| err(line, format!("invalid relationship index {s:?}")))
}

/// Strips one optional opening and closing quote of any accepted style.
fn unquote(s: &str) -> &str {
    let s = s.trim();
    let s = s.strip_prefix(OPEN_QUOTES).unwrap_or(s);
    let s = s.strip_suffix(CLOSE_QUOTES).unwrap_or(s);
    s.trim()
}

fn parse_name(s: &str, line: usize) -> Result<String, ParseError> {
    let name = unquote(s);
    if name.is_empty() {
        Err(err(line, "empty name"))
    } else {
        Ok(name.to_string())
    }
}

fn parse_tuple(s: &str, line: usize) -> Result<NamedVrType, ParseError> {
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("malformed tuple literal {s:?}")))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(err(
            line,
            format!("tuple literal needs 3 names, found {}", parts.len()),
        ));
    }
    Ok(NamedVrType::new(
        parse_name(parts[0], line)?,
        parse_name(parts[1], line)?,
        parse_name(parts[2], line)?,
    ))
}

fn parse_bbox(s: &str, line: usize) -> Result<BoundingBox, ParseError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("malformed bbox literal {s:?}")))?;
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            err(
                line,
                format!("bbox coordinates must be non-negative integers: {s:?}"),
            )
        })?;
    match coords[..] {
        [ymin, ymax, xmin, xmax] => Ok(BoundingBox::new(
            ymin.into(),
            ymax.into(),
            xmin.into(),
            xmax.into(),
        )),
        _ => Err(err(
            line,
            format!("bbox literal needs 4 coordinates, found {}", coords.len()),
        )),
    }
}
