const OPEN: &str = "<think>";
const CLOSE: &str = "</think>";

/// Removes every `<think>...</think>` span. An opening tag with no closing tag
/// swallows the rest of the text. The result is trimmed.
///
/// Removal repeats until nothing changes, so tags spliced together by an
/// earlier removal (`<thi<think>x</think>nk>`) are removed too.
pub fn strip_think(raw: &str) -> String {
    let mut current = strip_once(raw);
    loop {
        let next = strip_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn strip_once(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(start) = rest.find(OPEN) {
        out.push_str(&rest[..start]);
        match rest[start + OPEN.len()..].find(CLOSE) {
            Some(end) => rest = &rest[start + OPEN.len() + end + CLOSE.len()..],
            None => {
                rest = "";
                break;
            }
        }
    }
    out.push_str(rest);
    out.trim().to_string()
}
