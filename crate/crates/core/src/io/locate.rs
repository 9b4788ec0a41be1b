//! Source positions of array elements in a JSON text, keyed by a
//! slash-separated path such as `/objects/2/attributes/0`.

use std::collections::HashMap;

use super::Location;

struct Frame {
    array: bool,
    path: String,
    next_index: usize,
    key: Option<String>,
}

pub(crate) struct Positions(HashMap<String, (usize, usize)>);

impl Positions {
    pub(crate) fn get(&self, path: &str) -> Option<Location> {
        self.0.get(path).map(|&(line, column)| Location::Text { line, column })
    }
}

pub(crate) fn element_positions(text: &str) -> Positions {
    let mut out = HashMap::new();
    let mut stack: Vec<Frame> = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut chars = text.chars().peekable();

    // path of the value starting here, recording array elements
    let start_value = |stack: &mut Vec<Frame>, out: &mut HashMap<String, (usize, usize)>, line, column| -> String {
        match stack.last_mut() {
            None => String::new(),
            Some(top) if top.array => {
                let path = format!("{}/{}", top.path, top.next_index);
                top.next_index += 1;
                out.insert(path.clone(), (line, column));
                path
            }
            Some(top) => format!("{}/{}", top.path, top.key.clone().unwrap_or_default()),
        }
    };

    while let Some(c) = chars.next() {
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
        match c {
            '{' | '[' => {
                let path = start_value(&mut stack, &mut out, l, col);
                stack.push(Frame {
                    array: c == '[',
                    path,
                    next_index: 0,
                    key: None,
                });
            }
            '}' | ']' => {
                stack.pop();
            }
            ',' => {
                if let Some(top) = stack.last_mut().filter(|t| !t.array) {
                    top.key = None;
                }
            }
            '"' => {
                let mut s = String::new();
                while let Some(d) = chars.next() {
                    column += 1;
                    match d {
                        '"' => break,
                        '\\' => {
                            if let Some(e) = chars.next() {
                                column += 1;
                                s.push(e);
                            }
                        }
                        '\n' => {
                            line += 1;
                            column = 1;
                            s.push(d);
                        }
                        _ => s.push(d),
                    }
                }
                match stack.last_mut() {
                    Some(top) if !top.array && top.key.is_none() => top.key = Some(s),
                    _ => {
                        start_value(&mut stack, &mut out, l, col);
                    }
                }
            }
            c if c.is_whitespace() || c == ':' => {}
            _ => {
                start_value(&mut stack, &mut out, l, col);
                while let Some(&d) = chars.peek() {
                    if matches!(d, ',' | '}' | ']') || d.is_whitespace() {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
        }
    }
    Positions(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nested_elements() {
        let text = "{\n  \"objects\": [\n    {\"id\": \"a\", \"attributes\": [1, {\"x\": \"]\"}]},\n    {\"id\": \"b\"}\n  ]\n}";
        let p = element_positions(text);
        assert_eq!(p.get("/objects/0"), Some(Location::Text { line: 3, column: 5 }));
        assert_eq!(p.get("/objects/1"), Some(Location::Text { line: 4, column: 5 }));
        assert_eq!(
            p.get("/objects/0/attributes/1"),
            Some(Location::Text { line: 3, column: 35 })
        );
        assert_eq!(p.get("/objects/2"), None);
    }
}
