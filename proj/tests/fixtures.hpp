#pragma once

#include <string>

// Reference fleet specification used across the suites: two matrix entries
// sharing one Dockerfile, global args, synonymous tags on the first entry.
inline std::string mathcomp_spec_text() {
  return R"(---
base_url: 'https://gitlab.com/math-comp/docker-mathcomp'
active: true
gitlab_ci_tags:
  - 'large'
args:
  COQ_TAG: '{matrix[coq]}'
  MATHCOMP_VERSION: '{matrix[mathcomp]}'
docker_repo: 'mathcomp/mathcomp'
images:
  - matrix:
      mathcomp: ['2.2.0']
      coq: ['dev', '8.19', '8.18', '8.17', '8.16']
    build:
      keywords:
        - '{matrix[coq]}'
      context: './mathcomp'
      dockerfile: './single/Dockerfile'
      tags:
        - tag: '{matrix[mathcomp]}-coq-{matrix[coq]}'
        - tag: 'latest-coq-{matrix[coq]}'
  - matrix:
      mathcomp: ['2.1.0']
      coq: ['8.18', '8.17', '8.16']
    build:
      keywords:
        - '{matrix[coq]}'
      context: './mathcomp'
      dockerfile: './single/Dockerfile'
      tags:
        - tag: '{matrix[mathcomp]}-coq-{matrix[coq]}'
)";
}

// Two-target propagation block: an ordered strategy per child repository,
// quantified conditions over the selected builds, keyword forwarding.
inline std::string propagate_block_text() {
  return R"(propagate:
  mathcomp:
    api_token_env_var: 'DMC_TOKEN'
    gitlab_domain: 'gitlab.inria.fr'
    gitlab_project: '44938'
    strategy:
      - when: 'rebuild-all'
        mode: 'rebuild-all'
      - when: 'forall'
        expr: '{matrix[coq][//pl/.][%.*]}'
        subset: '8.4,8.5'
        mode: 'nil'
      - mode: 'rebuild-keyword'
        item: '{keywords[/#/,][#,]}'
  mathcomp-dev:
    api_token_env_var: 'MC_TOKEN'
    gitlab_domain: 'gitlab.inria.fr'
    gitlab_project: '44939'
    strategy:
      - when: 'rebuild-all'
        mode: 'minimal'
      - when: 'forall'
        expr: '{matrix[coq]}'
        subset: 'dev'
        mode: 'nightly'
      - when: 'exists'
        expr: '{matrix[coq][//pl/.][%.*]}'
        subset: '8.18,8.19,8.20,dev'
        mode: 'minimal'
)";
}

// A coq-style fleet whose entries carry pl-suffixed versions, exercising the
// propagation strategies above.
inline std::string coq_spec_text(const std::string& coq_versions) {
  return std::string(R"(---
base_url: 'https://gitlab.com/coq-community/docker-coq'
active: true
docker_repo: 'coqorg/coq'
args:
  COQ_VERSION: '{matrix[coq]}'
images:
  - matrix:
      coq: [)") +
         coq_versions + R"(]
    build:
      keywords:
        - '{matrix[coq]}'
      context: './coq'
      dockerfile: './Dockerfile'
      tags:
        - tag: '{matrix[coq]}'
)" + propagate_block_text();
}
