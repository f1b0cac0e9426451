#include "dnclab/corpus/synth.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "dnclab/nn/rng.hpp"

namespace dnclab::corpus {

namespace {

using nn::Rng;

const std::vector<std::string> kLocations = {"bathroom", "bedroom", "garden",  "hallway",
                                             "kitchen",  "office",  "park",    "school"};
const std::vector<std::string> kNames = {"daniel", "john", "mary", "sandra"};
const std::vector<std::string> kVerbs = {"journeyed", "moved", "travelled", "went"};
const std::vector<std::string> kDirections = {"north", "south", "east", "west"};
const std::vector<std::string> kDirLetters = {"n", "s", "e", "w"};
const std::vector<std::string> kDedEntities = {"emily", "gertrude", "jessica", "winona"};
const std::vector<std::string> kDedKinds = {"bison", "deer", "sheep", "trout"};
const std::vector<std::string> kFears = {"cats", "hawks", "snakes", "wolves"};
const std::vector<std::string> kIndMembers = {"bernhard", "greg", "julius", "lily"};
const std::vector<std::string> kIndKinds = {"frog", "lion", "rhino", "swan"};
const std::vector<std::string> kColors = {"gray", "green", "white", "yellow"};

constexpr int kMaxRetries = 100;

Sentence statement(std::vector<std::string> tokens) {
  Sentence s;
  s.tokens = std::move(tokens);
  s.tokens.push_back(".");
  return s;
}

Sentence question(std::vector<std::string> tokens, std::vector<std::string> answers) {
  Sentence s;
  s.tokens = std::move(tokens);
  s.tokens.push_back("?");
  s.kind = SentenceKind::question;
  s.answers = std::move(answers);
  return s;
}

std::vector<std::string> sample_distinct(const std::vector<std::string>& bank, int n, Rng& rng) {
  if (n < 1 || n > int(bank.size()))
    throw std::invalid_argument("synth: requested " + std::to_string(n) + " items from a bank of " +
                                std::to_string(bank.size()));
  std::vector<std::string> pool = bank;
  rng.shuffle(pool);
  pool.resize(n);
  return pool;
}

int dir_index(const std::string& d) {
  for (int i = 0; i < 4; ++i)
    if (kDirections[i] == d) return i;
  return -1;
}

// grid deltas for north, south, east, west
const int kDx[4] = {0, 0, 1, -1};
const int kDy[4] = {1, -1, 0, 0};
int opposite(int d) { return d ^ 1; }

struct DirEdge {
  std::string from, to;  // "to is (dir) of from": moving (dir) from `from` reaches `to`
  int dir;
};

Sentence edge_sentence(const DirEdge& e, Rng& rng) {
  // orient randomly: "the T is D of the F ." or "the F is opp(D) of the T ."
  if (rng.below(2) == 0)
    return statement({"the", e.to, "is", kDirections[e.dir], "of", "the", e.from});
  return statement({"the", e.from, "is", kDirections[opposite(e.dir)], "of", "the", e.to});
}

Story gen_movement(const SynthParams& p, Rng& rng) {
  const auto entities = sample_distinct(kNames, p.n_entities, rng);
  const auto locations = sample_distinct(kLocations, p.n_locations, rng);
  if (p.n_sentences < 1 || p.n_questions < 1)
    throw std::invalid_argument("synth: movement needs >=1 sentence and question");

  struct Move {
    std::string who, verb, where;
  };
  // entities move in shuffled rounds: nobody moves twice before everyone has
  // moved once, so short stories stay in the associative-retrieval regime
  std::vector<Move> moves;
  std::vector<std::string> pool;
  for (int i = 0; i < p.n_sentences; ++i) {
    if (pool.empty()) {
      pool = entities;
      rng.shuffle(pool);
    }
    const std::string who = pool.back();
    pool.pop_back();
    moves.push_back({who, rng.pick(kVerbs), rng.pick(locations)});
  }

  Story story;
  story.task_id = kind_name(TaskKind::movement);
  std::map<std::string, std::string> loc;
  for (const Move& m : moves) {
    story.sentences.push_back(statement({m.who, m.verb, "to", "the", m.where}));
    loc[m.who] = m.where;
  }
  // questions follow the statements and ask distinct movers first, so most
  // answers require retrieving an older binding rather than echoing the
  // latest sentence
  std::vector<std::string> movers;
  for (const auto& [who, _] : loc) movers.push_back(who);
  rng.shuffle(movers);
  for (int qi = 0; qi < p.n_questions; ++qi) {
    const std::string& who = movers[size_t(qi) % movers.size()];
    story.sentences.push_back(question({"where", "is", who}, {loc.at(who)}));
  }
  return story;
}

Story gen_direction_graph(const SynthParams& p, Rng& rng) {
  if (p.n_locations < 2) throw std::invalid_argument("synth: direction-graph needs >=2 locations");
  const auto locs = sample_distinct(kLocations, p.n_locations, rng);

  // random spanning tree embedded in the grid; unique paths by construction
  std::map<std::pair<int, int>, std::string> grid;
  std::map<std::string, std::pair<int, int>> pos;
  std::vector<DirEdge> edges;
  pos[locs[0]] = {0, 0};
  grid[{0, 0}] = locs[0];
  for (size_t i = 1; i < locs.size(); ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
      const std::string& anchor = locs[rng.below(int(i))];
      const int d = rng.below(4);
      const auto [ax, ay] = pos.at(anchor);
      const std::pair<int, int> cell = {ax + kDx[d], ay + kDy[d]};
      if (grid.count(cell)) continue;
      grid[cell] = locs[i];
      pos[locs[i]] = cell;
      edges.push_back({anchor, locs[i], d});
      placed = true;
    }
    if (!placed) throw std::invalid_argument("synth: could not embed direction graph");
  }

  Story story;
  story.task_id = kind_name(TaskKind::direction_graph);
  for (const DirEdge& e : edges) story.sentences.push_back(edge_sentence(e, rng));
  // honor n_sentences by restating random edges in the other orientation
  while (int(story.sentences.size()) < p.n_sentences)
    story.sentences.push_back(edge_sentence(edges[rng.below(int(edges.size()))], rng));
  rng.shuffle(story.sentences);

  // adjacency for path answers
  std::map<std::string, std::vector<std::pair<std::string, int>>> adj;
  for (const DirEdge& e : edges) {
    adj[e.from].push_back({e.to, e.dir});
    adj[e.to].push_back({e.from, opposite(e.dir)});
  }
  auto path = [&](const std::string& a, const std::string& b) {
    std::map<std::string, std::pair<std::string, int>> from;
    std::queue<std::string> q;
    q.push(a);
    from[a] = {a, -1};
    while (!q.empty()) {
      const std::string cur = q.front();
      q.pop();
      if (cur == b) break;
      for (const auto& [nxt, d] : adj[cur])
        if (!from.count(nxt)) {
          from[nxt] = {cur, d};
          q.push(nxt);
        }
    }
    std::vector<std::string> dirs;
    for (std::string cur = b; cur != a; cur = from.at(cur).first)
      dirs.insert(dirs.begin(), kDirLetters[from.at(cur).second]);
    return dirs;
  };

  for (int qi = 0; qi < p.n_questions; ++qi) {
    std::string a, b;
    std::vector<std::string> answer;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      a = rng.pick(locs);
      b = rng.pick(locs);
      if (a == b) continue;
      answer = path(a, b);
      if (int(answer.size()) <= 2) break;  // short path questions, as in the source tasks
      answer.clear();
    }
    if (answer.empty()) throw std::invalid_argument("synth: no short path question found");
    story.sentences.push_back(
        question({"how", "do", "you", "go", "from", "the", a, "to", "the", b}, answer));
  }
  return story;
}

Story gen_deduction(const SynthParams& p, Rng& rng) {
  const int n_kinds = std::min(p.n_locations, int(kDedKinds.size()));
  const auto entities = sample_distinct(kDedEntities, p.n_entities, rng);
  const auto kinds = sample_distinct(kDedKinds, n_kinds, rng);

  std::map<std::string, std::string> kind_of, fear_of;
  for (const std::string& e : entities) kind_of[e] = rng.pick(kinds);
  for (const std::string& k : kinds) fear_of[k] = rng.pick(kFears);

  std::vector<Sentence> stmts;
  for (const std::string& e : entities) stmts.push_back(statement({e, "is", "a", kind_of[e]}));
  for (const std::string& k : kinds)
    stmts.push_back(statement({k, "are", "afraid", "of", fear_of[k]}));
  while (int(stmts.size()) < p.n_sentences) stmts.push_back(stmts[rng.below(int(stmts.size()))]);
  rng.shuffle(stmts);

  Story story;
  story.task_id = kind_name(TaskKind::deduction);
  story.sentences = std::move(stmts);
  auto queried = entities;
  rng.shuffle(queried);
  for (int qi = 0; qi < p.n_questions; ++qi) {
    const std::string& e = queried[qi % queried.size()];
    story.sentences.push_back(
        question({"what", "is", e, "afraid", "of"}, {fear_of.at(kind_of.at(e))}));
  }
  return story;
}

Story gen_induction(const SynthParams& p, Rng& rng) {
  if (p.n_entities < 2) throw std::invalid_argument("synth: induction needs >=2 members");
  const int n_kinds = std::max(1, std::min({p.n_locations, p.n_entities / 2, int(kIndKinds.size())}));
  const auto members = sample_distinct(kIndMembers, p.n_entities, rng);
  const auto kinds = sample_distinct(kIndKinds, n_kinds, rng);

  // round-robin kinds so every kind has a witness plus at least one other member
  std::map<std::string, std::string> kind_of;
  std::map<std::string, std::string> color_of_kind;
  std::map<std::string, std::string> witness_of_kind;
  for (size_t i = 0; i < members.size(); ++i) kind_of[members[i]] = kinds[i % kinds.size()];
  for (size_t i = 0; i < kinds.size(); ++i) {
    color_of_kind[kinds[i]] = rng.pick(kColors);
    witness_of_kind[kinds[i]] = members[i];  // member i has kind i for i < n_kinds
  }

  std::vector<Sentence> stmts;
  for (const std::string& m : members) stmts.push_back(statement({m, "is", "a", kind_of[m]}));
  for (const std::string& k : kinds)
    stmts.push_back(statement({witness_of_kind[k], "is", color_of_kind[k]}));
  while (int(stmts.size()) < p.n_sentences) stmts.push_back(stmts[rng.below(int(stmts.size()))]);
  rng.shuffle(stmts);

  std::vector<std::string> queryable;
  for (const std::string& m : members)
    if (witness_of_kind.at(kind_of.at(m)) != m) queryable.push_back(m);
  if (queryable.empty()) throw std::invalid_argument("synth: induction has nobody to ask about");

  Story story;
  story.task_id = kind_name(TaskKind::induction);
  story.sentences = std::move(stmts);
  for (int qi = 0; qi < p.n_questions; ++qi) {
    const std::string& m = queryable[qi % queryable.size()];
    story.sentences.push_back(
        question({"what", "color", "is", m}, {color_of_kind.at(kind_of.at(m))}));
  }
  return story;
}

}  // namespace

std::string kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::movement: return "movement";
    case TaskKind::direction_graph: return "direction-graph";
    case TaskKind::deduction: return "deduction";
    case TaskKind::induction: return "induction";
  }
  throw std::logic_error("kind_name");
}

TaskKind kind_from_name(const std::string& name) {
  if (name == "movement") return TaskKind::movement;
  if (name == "direction-graph") return TaskKind::direction_graph;
  if (name == "deduction") return TaskKind::deduction;
  if (name == "induction") return TaskKind::induction;
  throw std::invalid_argument("unknown task kind: " + name);
}

std::vector<Story> synth_generate(TaskKind kind, const SynthParams& params, uint64_t seed,
                                  int n_stories) {
  std::vector<Story> stories;
  for (int i = 0; i < n_stories; ++i) {
    Rng rng(nn::derive_stream(seed, uint64_t(i)));
    Story story;
    switch (kind) {
      case TaskKind::movement: story = gen_movement(params, rng); break;
      case TaskKind::direction_graph: story = gen_direction_graph(params, rng); break;
      case TaskKind::deduction: story = gen_deduction(params, rng); break;
      case TaskKind::induction: story = gen_induction(params, rng); break;
    }
    // the simulator's answers must agree with the interpreter on the final text
    const auto check = oracle_answers(kind, story);
    size_t qi = 0;
    for (const Sentence& s : story.sentences) {
      if (s.kind != SentenceKind::question) continue;
      if (check.at(qi) != s.answers) throw std::logic_error("synth: oracle disagrees with gold");
      ++qi;
    }
    stories.push_back(std::move(story));
  }
  return stories;
}

std::vector<std::vector<std::string>> oracle_answers(TaskKind kind, const Story& story) {
  std::vector<std::vector<std::string>> answers;

  // movement
  std::map<std::string, std::string> last_loc;
  // direction graph
  std::map<std::string, std::vector<std::pair<std::string, int>>> adj;
  // deduction / induction
  std::map<std::string, std::string> kind_of, fear_of;
  std::vector<std::pair<std::string, std::string>> color_obs;  // (member, color) in order

  auto bfs_path = [&](const std::string& a, const std::string& b) {
    std::map<std::string, std::pair<std::string, int>> from;
    std::queue<std::string> q;
    q.push(a);
    from[a] = {a, -1};
    while (!q.empty()) {
      const std::string cur = q.front();
      q.pop();
      if (cur == b) break;
      auto it = adj.find(cur);
      if (it == adj.end()) continue;
      for (const auto& [nxt, d] : it->second)
        if (!from.count(nxt)) {
          from[nxt] = {cur, d};
          q.push(nxt);
        }
    }
    if (!from.count(b)) throw std::runtime_error("oracle: no path from " + a + " to " + b);
    std::vector<std::string> dirs;
    for (std::string cur = b; cur != a; cur = from.at(cur).first)
      dirs.insert(dirs.begin(), kDirLetters[from.at(cur).second]);
    return dirs;
  };

  for (const Sentence& s : story.sentences) {
    const auto& t = s.tokens;
    if (s.kind == SentenceKind::statement) {
      switch (kind) {
        case TaskKind::movement:
          if (t.size() == 6 && t[2] == "to" && t[3] == "the" && t[5] == ".") last_loc[t[0]] = t[4];
          break;
        case TaskKind::direction_graph:
          if (t.size() == 8 && t[0] == "the" && t[2] == "is" && t[4] == "of" && t[5] == "the" &&
              t[7] == "." && dir_index(t[3]) >= 0) {
            // "the A is D of the B .": moving D from B reaches A
            const int d = dir_index(t[3]);
            adj[t[6]].push_back({t[1], d});
            adj[t[1]].push_back({t[6], opposite(d)});
          }
          break;
        case TaskKind::deduction:
          if (t.size() == 5 && t[1] == "is" && t[2] == "a" && t[4] == ".") kind_of[t[0]] = t[3];
          if (t.size() == 6 && t[1] == "are" && t[2] == "afraid" && t[3] == "of" && t[5] == ".")
            fear_of[t[0]] = t[4];
          break;
        case TaskKind::induction:
          if (t.size() == 5 && t[1] == "is" && t[2] == "a" && t[4] == ".") kind_of[t[0]] = t[3];
          else if (t.size() == 4 && t[1] == "is" && t[3] == ".") color_obs.push_back({t[0], t[2]});
          break;
      }
      continue;
    }

    switch (kind) {
      case TaskKind::movement: {
        if (t.size() != 4 || t[0] != "where" || t[1] != "is")
          throw std::runtime_error("oracle: unrecognized movement question");
        answers.push_back({last_loc.at(t[2])});
        break;
      }
      case TaskKind::direction_graph: {
        if (t.size() != 11 || t[0] != "how" || t[4] != "from")
          throw std::runtime_error("oracle: unrecognized direction question");
        answers.push_back(bfs_path(t[6], t[9]));
        break;
      }
      case TaskKind::deduction: {
        if (t.size() != 6 || t[0] != "what" || t[3] != "afraid")
          throw std::runtime_error("oracle: unrecognized deduction question");
        answers.push_back({fear_of.at(kind_of.at(t[2]))});
        break;
      }
      case TaskKind::induction: {
        if (t.size() != 5 || t[0] != "what" || t[1] != "color")
          throw std::runtime_error("oracle: unrecognized induction question");
        const std::string& k = kind_of.at(t[3]);
        std::string color;
        for (const auto& [member, c] : color_obs)
          if (kind_of.count(member) && kind_of.at(member) == k) color = c;
        if (color.empty()) throw std::runtime_error("oracle: no color witness for " + t[3]);
        answers.push_back({color});
        break;
      }
    }
  }
  return answers;
}

const std::vector<std::string>& location_bank() { return kLocations; }
const std::vector<std::string>& name_bank() { return kNames; }

std::vector<std::string> synthetic_token_universe() {
  std::vector<std::string> all;
  for (const auto* bank :
       {&kLocations, &kNames, &kVerbs, &kDirections, &kDirLetters, &kDedEntities, &kDedKinds,
        &kFears, &kIndMembers, &kIndKinds, &kColors})
    all.insert(all.end(), bank->begin(), bank->end());
  const std::vector<std::string> glue = {"the", "is",   "of",  "to",    "a",  "are",  "afraid",
                                         "what", "where", "how", "do",  "you", "go",  "from",
                                         "color"};
  all.insert(all.end(), glue.begin(), glue.end());
  return all;
}

}  // namespace dnclab::corpus
