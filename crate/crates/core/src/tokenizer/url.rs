fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-'
}

/// Characters that end a URL path.
pub fn is_url_stop(c: char) -> bool {
    c.is_whitespace() || matches!(c, '，' | '。' | '；' | '、' | '“' | '”' | '（' | '）')
}

/// A URL may start only at an ASCII alphanumeric that does not continue a
/// host-like run.
pub fn could_start_url(text: &[char], pos: usize) -> bool {
    text[pos].is_ascii_alphanumeric()
        && (pos == 0 || !(is_label_char(text[pos - 1]) || text[pos - 1] == '.'))
}

/// Length of the URL at the start of `text`, if any.
///
/// Accepts an optional `http://` or `https://` scheme, at least two
/// dot-separated labels of `[A-Za-z0-9-]`, and an optional path introduced by
/// `/`, `?`, `#` or `:` running up to whitespace or CJK punctuation. Without a
/// scheme the last label must contain a letter, so decimals like `7.5` stay
/// numbers.
pub fn builtin_url_match(text: &[char]) -> Option<usize> {
    let starts_with = |p: &str| {
        let p: Vec<char> = p.chars().collect();
        text.len() >= p.len() && text[..p.len()] == p[..]
    };
    let scheme = if starts_with("https://") {
        8
    } else if starts_with("http://") {
        7
    } else {
        0
    };

    let mut i = scheme;
    let mut labels = 0;
    let mut last_label = (i, i);
    loop {
        let start = i;
        while i < text.len() && is_label_char(text[i]) {
            i += 1;
        }
        if i == start {
            break;
        }
        labels += 1;
        last_label = (start, i);
        if i + 1 < text.len() && text[i] == '.' && is_label_char(text[i + 1]) {
            i += 1;
        } else {
            break;
        }
    }
    if labels < 2 {
        return None;
    }
    if scheme == 0 && !text[last_label.0..last_label.1].iter().any(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    if i < text.len() && matches!(text[i], '/' | '?' | '#' | ':') {
        while i < text.len() && !is_url_stop(text[i]) {
            i += 1;
        }
    }
    Some(i)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn url(s: &str) -> Option<usize> {
        builtin_url_match(&s.chars().collect::<Vec<_>>())
    }

    #[test]
    fn bare_host() {
        assert_eq!(url("www.baidu.com"), Some(13));
        assert_eq!(url("www.baidu.com后文"), Some(13));
    }

    #[test]
    fn single_label_is_not_a_url() {
        assert_eq!(url("baidu"), None);
        assert_eq!(url("baidu."), None);
    }

    #[test]
    fn path_stops_at_full_width_comma() {
        // oracle: scan to the first stop-set character
        let s = "https://a.b/c，后文";
        let expected = s.chars().position(is_url_stop).unwrap();
        assert_eq!(expected, "https://a.b/c".chars().count());
        assert_eq!(url(s), Some(expected));
    }

    #[test]
    fn trailing_dot_is_not_part_of_host() {
        assert_eq!(url("a.cn."), Some(4));
    }

    #[test]
    fn decimals_are_not_hosts() {
        assert_eq!(url("7.5"), None);
        assert_eq!(url("http://10.0.0.1/x"), Some(17));
    }

    #[test]
    fn start_positions() {
        let t: Vec<char> = "开www.a.com x.y".chars().collect();
        assert!(could_start_url(&t, 1));
        assert!(!could_start_url(&t, 2));
        assert!(!could_start_url(&t, 0));
        assert!(could_start_url(&t, 11));
    }
}
