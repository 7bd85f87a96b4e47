// Copyright 2026-present the nanorag authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nanorag/errors.hpp"
#include "nanorag/rag.hpp"

namespace nanorag {

void GenerationConfig::validate() const {
    if (max_new_tokens < 1) throw InvalidArgument("max_new_tokens must be >= 1");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw InvalidArgument("temperature must be in [0, 2]");
    if (context_budget_tokens < 1) throw InvalidArgument("context_budget_tokens must be positive");
}

std::string render_context_block(const ContextBlock& block) {
    std::string out = "[" + std::to_string(block.rank) + "] " + block.source.title + " (" +
                      std::to_string(block.source.year) + "). DOI: " + block.source.doi + "\n";
    out += block.text;
    return out;
}

std::vector<ChatMessage> Prompt::messages() const {
    std::vector<ChatMessage> out;
    out.push_back({"system", system_text});
    for (const auto& turn : history) {
        out.push_back({"user", turn.question});
        out.push_back({"assistant", turn.answer});
    }
    std::string user;
    if (!context_blocks.empty()) {
        user = "Context:\n\n";
        for (std::size_t i = 0; i < context_blocks.size(); ++i) {
            if (i) user += "\n\n";
            user += render_context_block(context_blocks[i]);
        }
        user += "\n\n";
    }
    user += "Question: " + question;
    out.push_back({"user", std::move(user)});
    return out;
}

namespace {

std::size_t prompt_tokens(const Prompt& p, const Tokenizer& tokenizer) {
    std::size_t total = 0;
    for (const auto& m : p.messages()) total += tokenizer.count(m.content);
    return total;
}

}  // namespace

Prompt assemble_prompt(const std::string& question, std::span<const ContextBlock> blocks,
                       std::span<const HistoryTurn> history, const GenerationConfig& cfg,
                       const Tokenizer& tokenizer) {
    cfg.validate();
    if (question.empty()) throw InvalidArgument("question must be non-empty");

    Prompt p;
    p.system_text = cfg.system_text;
    p.question = question;
    p.total_tokens = prompt_tokens(p, tokenizer);
    const std::size_t budget = cfg.context_budget_tokens;
    if (p.total_tokens > budget) {
        throw BudgetTooSmall("system text and question need " + std::to_string(p.total_tokens) +
                             " tokens, budget is " + std::to_string(budget));
    }

    // Each candidate is measured on the fully rendered prompt, so framing text
    // is always accounted for whatever tokenizer is configured.
    for (const auto& block : blocks) {
        p.context_blocks.push_back(block);
        const auto total = prompt_tokens(p, tokenizer);
        if (total <= budget) {
            p.total_tokens = total;
        } else {
            p.context_blocks.pop_back();
        }
    }

    std::size_t turns_used = 0;
    for (auto it = history.rbegin(); it != history.rend() && turns_used < cfg.max_history_turns; ++it) {
        p.history.insert(p.history.begin(), *it);
        const auto total = prompt_tokens(p, tokenizer);
        if (total <= budget) {
            p.total_tokens = total;
            ++turns_used;
        } else {
            p.history.erase(p.history.begin());
        }
    }
    return p;
}

}  // namespace nanorag
