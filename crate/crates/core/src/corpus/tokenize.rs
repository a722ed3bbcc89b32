/// Lowercases `text` and splits it on every maximal run of characters that
/// are not Unicode alphanumeric. Digits are kept; no empty tokens.
///
/// ```
/// use semsearch::corpus::tokenize;
/// assert_eq!(tokenize("Ram's Center-12"), ["ram", "s", "center", "12"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}
