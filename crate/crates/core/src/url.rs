//! Just enough URL handling for page identity; no normalization beyond
//! dropping the scheme, query and fragment.

/// Scheme of `url`, lowercased comparison left to the caller.
pub(crate) fn scheme(url: &str) -> Option<&str> {
    let (scheme, _) = url.split_once("://")?;
    if scheme.is_empty()
        || !scheme
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b"+-.".contains(&b))
    {
        return None;
    }
    Some(scheme)
}

/// `host/path` of `url`, the key used to decide whether two events happened
/// on the same page.
pub(crate) fn page(url: &str) -> &str {
    let rest = match url.split_once("://") {
        Some((_, rest)) => rest,
        None => url,
    };
    let end = rest.find(['?', '#']).unwrap_or(rest.len());
    let page = &rest[..end];
    match page.strip_suffix('/') {
        Some(trimmed) if trimmed.contains('/') => trimmed,
        _ => page,
    }
}

/// Value of the first `key=` parameter in the query string, with `+` kept
/// as-is apart from being shown as a space.
pub(crate) fn query_param<'a>(url: &'a str, key: &str) -> Option<&'a str> {
    let query = url.split_once('?')?.1;
    let query = query.split('#').next().unwrap_or(query);
    query.split('&').find_map(|pair| {
        let (k, v) = pair.split_once('=')?;
        (k == key && !v.is_empty()).then_some(v)
    })
}
