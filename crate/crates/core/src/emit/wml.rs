use super::{attr, text, EmitOptions, Out, View};
use crate::model::{Part, UimlDocument};

/// Interactive widgets allowed on one card before it is split.
pub const WML_CARD_LIMIT: usize = 9;

const PROLOG: &str = "<?xml version=\"1.0\"?>\n<!DOCTYPE wml PUBLIC \"-//WAPFORUM//DTD WML 1.2//EN\" \"http://www.wapforum.org/DTD/wml12.dtd\">";

fn is_interactive(part: &Part) -> bool {
    matches!(part.widget_class.as_str(), "input" | "select" | "do-action")
}

fn is_container(part: &Part) -> bool {
    matches!(part.widget_class.as_str(), "deck" | "card")
}

struct Card<'d> {
    part: &'d Part,
    leaves: Vec<&'d Part>,
}

/// Collects cards in pre-order. Nested cards become separate cards; leaves
/// outside any card are gathered on a card named after their deck.
fn collect<'d>(view: &View<'d>, part: &'d Part, cards: &mut Vec<Card<'d>>) {
    let index = cards.len();
    cards.push(Card { part, leaves: Vec::new() });
    for child in part.children.iter().filter(|c| view.visible(c)) {
        if is_container(child) {
            collect(view, child, cards);
        } else {
            cards[index].leaves.push(child);
        }
    }
}

/// Splits a card's leaves into pages of at most [`WML_CARD_LIMIT`]
/// interactive widgets. Non-interactive leaves stay with the interactive
/// widget that follows them.
fn paginate<'d>(leaves: &[&'d Part]) -> Vec<Vec<&'d Part>> {
    let mut units: Vec<Vec<&Part>> = Vec::new();
    let mut pending = Vec::new();
    for leaf in leaves {
        pending.push(*leaf);
        if is_interactive(leaf) {
            units.push(std::mem::take(&mut pending));
        }
    }
    if !pending.is_empty() {
        match units.last_mut() {
            Some(last) => last.extend(pending),
            None => units.push(pending),
        }
    }
    let mut pages: Vec<Vec<&Part>> = Vec::new();
    let mut count = 0;
    for unit in units {
        let n = unit.iter().filter(|p| is_interactive(p)).count();
        if pages.is_empty() || count + n > WML_CARD_LIMIT {
            pages.push(Vec::new());
            count = 0;
        }
        count += n;
        pages.last_mut().expect("page exists").extend(unit);
    }
    pages
}

/// Deck-of-cards WML. Each card part becomes a `<card>`; a card holding more
/// than [`WML_CARD_LIMIT`] interactive widgets continues on follow-up cards
/// chained by `<do type="accept">` navigation.
pub fn emit_wml(doc: &UimlDocument, opts: &EmitOptions) -> String {
    let view = View::new(doc);
    let mut out = Out::new(opts);
    if opts.include_prolog {
        out.line(0, PROLOG);
    }
    let mut cards = Vec::new();
    for root in view.roots.iter().filter(|r| view.visible(r)) {
        if is_container(root) {
            collect(&view, root, &mut cards);
        } else {
            cards.push(Card { part: root, leaves: vec![root] });
        }
    }
    // a deck is not a card itself; keep it only if it carries loose leaves
    cards.retain(|c| c.part.widget_class != "deck" || !c.leaves.is_empty());
    if cards.is_empty() {
        out.line(0, "<wml></wml>");
        return out.buf;
    }
    out.line(0, "<wml>");
    for card in &cards {
        let title = view.text(card.part);
        let pages = paginate(&card.leaves);
        if pages.is_empty() {
            out.line(1, &format!("<card{}{}></card>", attr("id", &card.part.name), attr("title", &title)));
            continue;
        }
        let id = |i: usize| {
            if i == 0 {
                card.part.name.clone()
            } else {
                format!("{}-{}", card.part.name, i + 1)
            }
        };
        for (i, page) in pages.iter().enumerate() {
            out.line(1, &format!("<card{}{}>", attr("id", &id(i)), attr("title", &title)));
            out.line(2, "<p>");
            for leaf in page {
                widget(&view, &mut out, 3, leaf);
            }
            out.line(2, "</p>");
            if i + 1 < pages.len() {
                out.line(
                    2,
                    &format!("<do type=\"accept\" label=\"Next\"><go{}/></do>", attr("href", &format!("#{}", id(i + 1)))),
                );
            }
            out.line(1, "</card>");
        }
    }
    out.line(0, "</wml>");
    out.buf
}

fn widget(view: &View<'_>, out: &mut Out, depth: usize, part: &Part) {
    let name = attr("name", &part.name);
    match part.widget_class.as_str() {
        "input" => {
            let value = view.prop(part, "value").map(|v| attr("value", &v)).unwrap_or_default();
            out.line(depth, &format!("<input{name}{value}/>"));
        }
        "select" => {
            let options: String = view
                .items(part, "items")
                .iter()
                .map(|item| format!("<option{}>{}</option>", attr("value", item), text(item)))
                .collect();
            out.line(depth, &format!("<select{name}>{options}</select>"));
        }
        "do-action" => out.line(
            depth,
            &format!("<do type=\"options\"{name}{}><noop/></do>", attr("label", &view.text(part))),
        ),
        _ => out.line(depth, &text(&view.text(part))),
    }
}
