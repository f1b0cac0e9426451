#include "dnclab/corpus/babi.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dnclab::corpus {

namespace {

[[noreturn]] void parse_error(size_t line_no, const std::string& line, const std::string& why) {
  throw std::runtime_error("babi parse error at line " + std::to_string(line_no) + " (" + why +
                           "): " + line);
}

std::string clean_word(const std::string& w) {
  std::string out;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) continue;
    out.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// whitespace split, then peel trailing '.'/'?' into their own tokens
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    std::string tail;
    while (!w.empty() && (w.back() == '.' || w.back() == '?')) {
      tail.insert(tail.begin(), w.back());
      w.pop_back();
    }
    std::string cleaned = clean_word(w);
    if (!cleaned.empty()) tokens.push_back(cleaned);
    for (char c : tail) tokens.push_back(std::string(1, c));
  }
  return tokens;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<Story> parse_babi(const std::string& raw_text, const std::string& task_id) {
  std::vector<Story> stories;
  std::istringstream in(raw_text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    size_t pos = 0;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == 0) parse_error(line_no, line, "no line number");
    const long number = std::stol(line.substr(0, pos));
    std::string rest = line.substr(pos);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.erase(rest.begin());

    if (number == 1 || stories.empty()) {
      Story s;
      s.task_id = task_id;
      stories.push_back(std::move(s));
    }

    const auto fields = split(rest, '\t');
    Sentence sent;
    sent.tokens = tokenize(fields[0]);
    if (sent.tokens.empty()) parse_error(line_no, line, "empty sentence");

    const bool is_question = sent.tokens.back() == "?";
    if (is_question) {
      if (fields.size() < 2 || fields[1].empty())
        parse_error(line_no, line, "question without answer field");
      sent.kind = SentenceKind::question;
      for (const std::string& ans : split(fields[1], ',')) {
        const std::string cleaned = clean_word(ans);
        if (cleaned.empty()) parse_error(line_no, line, "empty answer token");
        sent.answers.push_back(cleaned);
      }
      // supporting-fact ids in fields[2] are parsed away and discarded
    } else {
      if (sent.tokens.back() != ".") parse_error(line_no, line, "statement missing final '.'");
      if (fields.size() > 1 && !fields[1].empty())
        parse_error(line_no, line, "answer field on a statement");
    }
    stories.back().sentences.push_back(std::move(sent));
  }

  for (size_t i = 0; i < stories.size(); ++i) {
    bool has_question = false;
    for (const Sentence& s : stories[i].sentences)
      if (s.kind == SentenceKind::question) has_question = true;
    if (!has_question)
      throw std::runtime_error("babi parse error: story " + std::to_string(i + 1) +
                               " has no question");
  }
  return stories;
}

std::string to_babi_text(const std::vector<Story>& stories) {
  std::string out;
  for (const Story& story : stories) {
    int n = 1;
    for (const Sentence& s : story.sentences) {
      out += std::to_string(n++);
      for (const std::string& t : s.tokens) {
        out += ' ';
        out += t;
      }
      if (s.kind == SentenceKind::question) {
        out += '\t';
        for (size_t i = 0; i < s.answers.size(); ++i) {
          if (i) out += ',';
          out += s.answers[i];
        }
      }
      out += '\n';
    }
  }
  return out;
}

std::string stories_to_json(const std::vector<Story>& stories) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Story& story : stories) {
    nlohmann::json js;
    js["task_id"] = story.task_id;
    js["sentences"] = nlohmann::json::array();
    for (const Sentence& s : story.sentences) {
      nlohmann::json sj;
      sj["tokens"] = s.tokens;
      sj["kind"] = s.kind == SentenceKind::question ? "question" : "statement";
      sj["answers"] = s.answers;
      if (s.adversarial) sj["adversarial"] = true;
      js["sentences"].push_back(std::move(sj));
    }
    arr.push_back(std::move(js));
  }
  return arr.dump(2) + "\n";
}

std::vector<Story> stories_from_json(const std::string& json_text) {
  const auto arr = nlohmann::json::parse(json_text);
  std::vector<Story> stories;
  for (const auto& js : arr) {
    Story story;
    story.task_id = js.at("task_id").get<std::string>();
    for (const auto& sj : js.at("sentences")) {
      Sentence s;
      s.tokens = sj.at("tokens").get<std::vector<std::string>>();
      const std::string kind = sj.at("kind").get<std::string>();
      s.kind = kind == "question" ? SentenceKind::question : SentenceKind::statement;
      s.answers = sj.at("answers").get<std::vector<std::string>>();
      s.adversarial = sj.value("adversarial", false);
      story.sentences.push_back(std::move(s));
    }
    stories.push_back(std::move(story));
  }
  return stories;
}

}  // namespace dnclab::corpus
