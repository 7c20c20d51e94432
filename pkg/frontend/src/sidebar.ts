// Query sidebar: token search (keywords/denovo, and/or, top-n), facet
// dropdowns, and a collapsible checkbox tree of leaf clusters. Every
// change reports a state patch upward, which re-issues the search.

import type { MetaResponse, NodeSummary } from './api';
import type { ViewState } from './state';

export interface SidebarCallbacks {
  onPatch(patch: Partial<ViewState>): void;
  // computed against the app's current state, not this render's snapshot
  onToggleCluster(pathId: string, selected: boolean): void;
  onFacetFilter(facet: string, value: string | null): void;
}

export class Sidebar {
  private root: HTMLElement;
  private callbacks: SidebarCallbacks;
  private facetValues = new Map<string, Set<string>>();

  constructor(root: HTMLElement, callbacks: SidebarCallbacks) {
    this.root = root;
    this.callbacks = callbacks;
  }

  render(state: ViewState, meta: MetaResponse, tree: NodeSummary | null): void {
    this.root.textContent = '';
    this.root.appendChild(this.tokenSection(state));
    this.root.appendChild(this.facetSection(state, meta));
    this.root.appendChild(this.clusterSection(state, tree));
  }

  registerFacetValues(facet: string, values: string[]): void {
    const known = this.facetValues.get(facet) ?? new Set<string>();
    values.forEach((v) => known.add(v));
    this.facetValues.set(facet, known);
  }

  private tokenSection(state: ViewState): HTMLElement {
    const section = el('section', 'sidebar-section token-search');
    section.appendChild(heading('Token search'));

    const input = document.createElement('input');
    input.type = 'text';
    input.className = 'token-input';
    input.placeholder = 'e.g. superconduct';
    input.value = state.tokens.join(' ');
    const apply = () => {
      const tokens = input.value.split(/\s+/).filter(Boolean);
      this.callbacks.onPatch({ tokens, docOffset: 0 });
    };
    input.addEventListener('change', apply);
    input.addEventListener('keydown', (e) => {
      if (e.key === 'Enter') apply();
    });
    section.appendChild(input);

    const controls = el('div', 'token-controls');

    const topn = document.createElement('select');
    topn.className = 'topn-select';
    for (const option of ['all', '5', '10', '20', '50']) {
      const opt = document.createElement('option');
      opt.value = option;
      opt.textContent = option === 'all' ? 'Top n: all' : `Top n: ${option}`;
      topn.appendChild(opt);
    }
    topn.value = state.topN === null ? 'all' : String(state.topN);
    topn.addEventListener('change', () => {
      this.callbacks.onPatch({
        topN: topn.value === 'all' ? null : Number(topn.value),
        docOffset: 0,
      });
    });
    controls.appendChild(topn);

    controls.appendChild(
      this.toggle('mode-toggle', ['keywords', 'denovo'], state.mode, (mode) =>
        this.callbacks.onPatch({ mode: mode as ViewState['mode'], docOffset: 0 }),
      ),
    );
    controls.appendChild(
      this.toggle('logic-toggle', ['or', 'and'], state.logic, (logic) =>
        this.callbacks.onPatch({ logic: logic as ViewState['logic'], docOffset: 0 }),
      ),
    );
    section.appendChild(controls);
    return section;
  }

  private toggle(
    className: string,
    options: string[],
    active: string,
    onPick: (value: string) => void,
  ): HTMLElement {
    const group = el('div', `toggle ${className}`);
    for (const option of options) {
      const button = document.createElement('button');
      button.type = 'button';
      button.textContent = option;
      button.className = option === active ? 'active' : '';
      button.dataset.option = option;
      button.addEventListener('click', () => onPick(option));
      group.appendChild(button);
    }
    return group;
  }

  private facetSection(state: ViewState, meta: MetaResponse): HTMLElement {
    const section = el('section', 'sidebar-section attribute-search');
    section.appendChild(heading('Attribute search'));
    for (const facet of meta.facets) {
      const row = el('div', 'facet-row');
      const label = document.createElement('label');
      label.textContent = facet;
      row.appendChild(label);
      const select = document.createElement('select');
      select.className = `facet-select facet-${facet}`;
      const any = document.createElement('option');
      any.value = '';
      any.textContent = '(any)';
      select.appendChild(any);
      const current = state.facetFilters[facet] ?? [];
      const known = new Set(this.facetValues.get(facet) ?? []);
      current.forEach((v) => known.add(v));
      for (const value of [...known].sort()) {
        const opt = document.createElement('option');
        opt.value = value;
        opt.textContent = value;
        select.appendChild(opt);
      }
      select.value = current[0] ?? '';
      select.addEventListener('change', () => {
        this.callbacks.onFacetFilter(facet, select.value || null);
      });
      row.appendChild(select);
      section.appendChild(row);
    }
    return section;
  }

  private clusterSection(state: ViewState, tree: NodeSummary | null): HTMLElement {
    const section = el('section', 'sidebar-section cluster-picker');
    section.appendChild(heading('Cluster picker'));
    if (!tree) {
      section.appendChild(el('p', 'placeholder', 'tree not loaded'));
      return section;
    }
    const selected = new Set(state.selectedClusters);
    const list = document.createElement('ul');
    list.className = 'cluster-tree';
    list.appendChild(this.clusterNode(tree, selected));
    section.appendChild(list);
    return section;
  }

  private clusterNode(node: NodeSummary, selected: Set<string>): HTMLElement {
    const item = document.createElement('li');
    item.className = 'cluster-node';
    item.dataset.pathId = node.path_id;
    const row = el('div', 'cluster-row');

    if (node.children.length) {
      const caret = document.createElement('button');
      caret.type = 'button';
      caret.className = 'caret';
      caret.textContent = '▾';
      caret.addEventListener('click', () => {
        item.classList.toggle('collapsed');
        caret.textContent = item.classList.contains('collapsed') ? '▸' : '▾';
      });
      row.appendChild(caret);
    } else {
      // only leaves carry working-set checkboxes
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.className = 'cluster-checkbox';
      checkbox.dataset.pathId = node.path_id;
      checkbox.checked = selected.has(node.path_id);
      checkbox.addEventListener('change', () => {
        this.callbacks.onToggleCluster(node.path_id, checkbox.checked);
      });
      row.appendChild(checkbox);
    }

    const label = document.createElement('span');
    label.className = 'cluster-label';
    label.textContent = `${node.path_id} (${node.size})`;
    label.addEventListener('click', () =>
      this.callbacks.onPatch({ focus: node.path_id, docOffset: 0 }),
    );
    row.appendChild(label);
    item.appendChild(row);

    if (node.children.length) {
      const children = document.createElement('ul');
      children.className = 'cluster-children';
      for (const child of node.children) {
        children.appendChild(this.clusterNode(child, selected));
      }
      item.appendChild(children);
    }
    return item;
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text) node.textContent = text;
  return node;
}

function heading(text: string): HTMLElement {
  return el('h3', 'sidebar-heading', text);
}
