use super::{attr, text, EmitOptions, Out, View};
use crate::model::{Part, UimlDocument};

/// VoiceXML-shaped dialog text. Fields take their prompt from the nearest
/// preceding prompt sibling; prompts used that way are not spoken again on
/// their own.
pub fn emit_voice(doc: &UimlDocument, opts: &EmitOptions) -> String {
    let view = View::new(doc);
    let mut out = Out::new(opts);
    if opts.include_prolog {
        out.line(0, "<?xml version=\"1.0\"?>");
    }
    let roots: Vec<&Part> = view.roots.iter().filter(|r| view.visible(r)).collect();
    if roots.is_empty() {
        out.line(0, "<vxml version=\"1.0\"></vxml>");
        return out.buf;
    }
    out.line(0, "<vxml version=\"1.0\">");
    let mut loose: Vec<&Part> = Vec::new();
    for root in roots {
        if root.widget_class == "dialog" {
            flush_loose(&view, &mut out, &mut loose);
            form(&view, &mut out, root);
        } else {
            loose.push(root);
        }
    }
    flush_loose(&view, &mut out, &mut loose);
    out.line(0, "</vxml>");
    out.buf
}

fn flush_loose(view: &View<'_>, out: &mut Out, loose: &mut Vec<&Part>) {
    if loose.is_empty() {
        return;
    }
    out.line(1, "<form id=\"main\">");
    items(view, out, 2, loose);
    out.line(1, "</form>");
    loose.clear();
}

fn form(view: &View<'_>, out: &mut Out, dialog: &Part) {
    let children: Vec<&Part> = dialog.children.iter().filter(|c| view.visible(c)).collect();
    let open = format!("<form{}>", attr("id", &dialog.name));
    if children.is_empty() {
        out.line(1, &format!("{open}</form>"));
        return;
    }
    out.line(1, &open);
    items(view, out, 2, &children);
    out.line(1, "</form>");
}

fn is_field(part: &Part) -> bool {
    matches!(part.widget_class.as_str(), "field-spoken" | "field-choice")
}

fn items(view: &View<'_>, out: &mut Out, depth: usize, parts: &[&Part]) {
    // index of the prompt each field speaks
    let mut prompt_of = vec![None; parts.len()];
    let mut last_prompt = None;
    for (i, p) in parts.iter().enumerate() {
        if p.widget_class == "prompt" {
            last_prompt = Some(i);
        } else if is_field(p) {
            prompt_of[i] = last_prompt;
        }
    }
    let consumed: Vec<usize> = prompt_of.iter().flatten().copied().collect();

    for (i, part) in parts.iter().enumerate() {
        let name = attr("name", &part.name);
        match part.widget_class.as_str() {
            "prompt" => {
                if !consumed.contains(&i) {
                    out.line(depth, &format!("<prompt>{}</prompt>", text(&view.text(part))));
                }
            }
            "field-spoken" | "field-choice" => {
                let prompt = prompt_of[i].map_or_else(|| view.text(part), |j| view.text(parts[j]));
                out.line(depth, &format!("<field{name}>"));
                out.line(depth + 1, &format!("<prompt>{}</prompt>", text(&prompt)));
                if part.widget_class == "field-choice" {
                    let choices = view.items(part, "choices").join("|");
                    out.line(depth + 1, &format!("<grammar>{}</grammar>", text(&choices)));
                }
                out.line(depth, "</field>");
            }
            "confirm-action" => {
                out.line(depth, &format!("<confirm{name}>"));
                out.line(depth + 1, &format!("<prompt>{}</prompt>", text(&view.text(part))));
                out.line(depth, "</confirm>");
            }
            "voice-form" | "dialog" => {
                let children: Vec<&Part> = part.children.iter().filter(|c| view.visible(c)).collect();
                if children.is_empty() {
                    out.line(depth, &format!("<group{name}></group>"));
                    continue;
                }
                out.line(depth, &format!("<group{name}>"));
                items(view, out, depth + 1, &children);
                out.line(depth, "</group>");
            }
            _ => out.line(depth, &format!("<prompt>{}</prompt>", text(&view.text(part)))),
        }
    }
}
