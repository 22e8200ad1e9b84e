"""
Модуль підкоманд пакетного інтерфейсу.

Кожна функція cmd_* отримує розв'язану конфігурацію, виконує один
експеримент і повертає код завершення. Помилки даних, використання та
числові збої піднімаються як винятки з core.errors і перетворюються на
коди завершення в main.py.
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Mapping, Tuple

import numpy as np

from config import ModelConfig, RunConfig, config_from_dict, config_to_dict
from core.errors import EXIT_OK, ConfigError, NumericalError
from core.monitor import RunMonitor
from core.records import NodeKind, NodeRef
from experiments.pipeline import (
    Dataset,
    Prepared,
    load_dataset,
    model_variant,
    prepare,
    protocol,
    resolve_dataset,
)
from featurizer.layout import DEFAULT_LAYOUT
from hetnet.snapshot import Edge, Snapshot
from hetnet.temporal import TemporalNetwork, align
from metrics.ranking import (
    evaluate_ranking,
    followers_reference_scores,
    rank_influencers,
    stratified_ndcg,
)
from metrics.report import ReportWriter
from model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from model.influencer_rank import forward, predict
from model.params import ModelVariant, init_params
from numkit.gradcheck import finite_diff_errors
from synthgen.world import generate_world, save_world
from trainer.loss import listmle_loss
from trainer.trainer import train


GRADCHECK_TOLERANCE = 1e-4
GRADCHECK_INFLUENCERS = 4
GRADCHECK_AUXILIARY = 2
GRADCHECK_DIM = 4


def _monitor(cfg: RunConfig) -> RunMonitor:
    return RunMonitor(verbose=cfg.verbose)


def _seeds(cfg: RunConfig) -> List[int]:
    return list(range(cfg.seed, cfg.seed + cfg.eval.repeats))


def _copy(cfg: RunConfig) -> RunConfig:
    return config_from_dict(config_to_dict(cfg))


def _metric_keys(cfg: RunConfig) -> List[str]:
    return [f"ndcg@{k}" for k in cfg.eval.ks] + ["rbp"]


def print_metrics(title: str, metrics: Mapping[str, float]):
    """Виводить блок метрик у форматі, однаковому для всіх підкоманд."""
    print(f"{title}:")
    for key, value in metrics.items():
        print(f"  {key:<12} {value:.4f}")
    print()


def score_influencers(scorer: str, prepared: Prepared, dataset: Dataset, seed: int,
                      params=None, variant: ModelVariant = ModelVariant.FULL) -> np.ndarray:
    """
    Обчислює оцінки інфлюенсерів оціночної мережі обраним джерелом.

    Args:
        scorer: model, oracle, random або followers
        prepared: Підготовлені мережі та мітки
        dataset: Набір даних (для кількості підписників)
        seed: Зерно випадкових оцінок
        params: Параметри моделі для scorer=model
        variant: Варіант архітектури для scorer=model

    Returns:
        Оцінки в порядку prepared.eval_net.influencer_ids
    """
    ids = prepared.eval_net.influencer_ids
    if scorer == "model":
        return predict(prepared.eval_net, params, variant)
    if scorer == "oracle":
        return np.array([prepared.eval_labels[i] for i in ids])
    if scorer == "random":
        return np.random.default_rng([seed, 4]).random(len(ids))
    if scorer == "followers":
        # відомі на момент прогнозу: останнє вхідне вікно
        known = prepared.followers(dataset, prepared.eval_target - 1)
        return followers_reference_scores(ids, known)
    raise ConfigError(f"Невідоме джерело оцінок: {scorer}")


def evaluate_scores(cfg: RunConfig, prepared: Prepared, scores: np.ndarray) -> Dict[str, float]:
    ranked = rank_influencers(prepared.eval_net.influencer_ids, scores, prepared.eval_labels)
    return evaluate_ranking(ranked, cfg.eval.ks, cfg.eval.rbp_p)


def fit_and_evaluate(cfg: RunConfig, prepared: Prepared, variant_name: str,
                     monitor: RunMonitor) -> Dict[str, float]:
    """Навчає модель на навчальній мережі та оцінює її на відкладеному вікні."""
    variant = model_variant(variant_name)
    result = train(prepared.train_net, prepared.train_labels, cfg.train, cfg.model,
                   variant, monitor)
    scores = predict(prepared.eval_net, result.params, variant)
    return evaluate_scores(cfg, prepared, scores)


def cmd_generate(cfg: RunConfig) -> int:
    """Генерує синтетичний світ і записує його в каталог даних."""
    monitor = _monitor(cfg)
    world = generate_world(cfg.world)
    monitor.log(f"Згенеровано {len(world.posts)} публікацій за {world.n_windows} вікон")
    paths = save_world(world, Path(cfg.paths.data_dir))

    print("Синтетичний світ:")
    print(f"  Інфлюенсерів: {len(world.profiles)}")
    print(f"  Публікацій: {len(world.posts)}")
    print(f"  Часових вікон: {world.n_windows}")
    print(f"  Зерно: {cfg.world.seed}")
    print()
    for name, path in paths.items():
        print(f"  {name:<9} {path}")
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    """
    Навчає модель на даних каталогу та записує контрольну точку й історію.

    Raises:
        DataError: Якщо даних немає
        NumericalError: Якщо функція втрат стала нескінченною
    """
    monitor = _monitor(cfg)
    dataset = load_dataset(Path(cfg.paths.data_dir), cfg.world.window_seconds)
    prepared = prepare(cfg, dataset)
    monitor.log(
        f"Мережа: {prepared.train_net.n_nodes} вузлів, {prepared.train_net.k} знімків"
    )

    variant = model_variant(cfg.variant)
    checkpoint_path = cfg.paths.checkpoint_path
    result = train(prepared.train_net, prepared.train_labels, cfg.train, cfg.model,
                   variant, monitor, checkpoint_path)
    save_checkpoint(checkpoint_path, Checkpoint(
        result.params, cfg.model, variant, metadata={
            "seed": cfg.seed,
            "variant": cfg.variant,
            "window_length": cfg.train.window_length,
            "epochs": cfg.train.epochs,
        },
    ))
    history_path, timing_path = result.history.write(cfg.paths.report_path)

    print("Навчання завершено:")
    print(f"  Епох: {cfg.train.epochs}")
    if result.history.records:
        last = result.history.records[-1]
        print(f"  Останні втрати: {last.loss:.6f}")
        print(f"  Валідація NDCG@10: {last.val_ndcg10:.4f}")
    print(f"  Контрольна точка: {checkpoint_path}")
    print(f"  Історія: {history_path}")
    print(f"  Час епох: {timing_path}")
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    """
    Ранжує всіх інфлюенсерів у відкладеному вікні та записує eval.csv.

    Звіт містить рядок обраного джерела оцінок, рядок еталонного
    ранжування за підписниками та рядки страт micro/mid/macro.

    Raises:
        DataError: Якщо даних або контрольної точки немає
    """
    monitor = _monitor(cfg)
    cfg = _copy(cfg)
    scorer = cfg.eval.scorer
    params, variant = None, ModelVariant.FULL
    if scorer == "model":
        checkpoint = load_checkpoint(cfg.paths.checkpoint_path)
        params, variant = checkpoint.params, checkpoint.variant
        cfg.variant = checkpoint.metadata.get("variant", cfg.variant)
        cfg.train.window_length = checkpoint.metadata.get("window_length",
                                                          cfg.train.window_length)
        monitor.log(f"Завантажено контрольну точку {cfg.paths.checkpoint_path}")

    dataset = load_dataset(Path(cfg.paths.data_dir), cfg.world.window_seconds)
    prepared = prepare(cfg, dataset)
    followers = prepared.followers(dataset, prepared.eval_target)
    writer = ReportWriter(cfg.paths.report_path / "eval.csv", config_to_dict(cfg))
    keys = _metric_keys(cfg)

    seeds = _seeds(cfg) if scorer == "random" else [cfg.seed]
    rows = []
    for seed in seeds:
        scores = score_influencers(scorer, prepared, dataset, seed, params, variant)
        ranked = rank_influencers(prepared.eval_net.influencer_ids, scores,
                                  prepared.eval_labels)
        metrics = evaluate_ranking(ranked, cfg.eval.ks, cfg.eval.rbp_p)
        rows.append(metrics)
        writer.add("eval", scorer, seed, metrics, stratum="all")
        strata = stratified_ndcg(ranked, followers, cfg.eval.ks, cfg.eval.rbp_p,
                                 cfg.eval.stratum_size, cfg.eval.stratum_repeats,
                                 np.random.default_rng([seed, 5]))
        for stratum, values in strata.items():
            count = int(values.pop("count"))
            writer.add("eval", scorer, seed, values, stratum=stratum, count=count)
    if len(rows) > 1:
        writer.add_median("eval", scorer, rows, keys, stratum="all")

    if scorer != "followers":
        reference = evaluate_scores(cfg, prepared,
                                    score_influencers("followers", prepared, dataset, cfg.seed))
        writer.add("eval", "followers-reference", cfg.seed, reference, stratum="all")
    path = writer.write()

    print_metrics(f"Оцінювання ({scorer}, цільове вікно {prepared.eval_target})", rows[0])
    print(f"Звіт збережено: {path}")
    return EXIT_OK


def cmd_ablate(cfg: RunConfig) -> int:
    """
    Навчає та оцінює варіант абляції для зерен seed..seed+repeats-1.

    Рядки дописуються в ablate.csv, за кількох зерен додається рядок медіан.
    """
    monitor = _monitor(cfg)
    model_variant(cfg.variant)
    writer = ReportWriter(cfg.paths.report_path / "ablate.csv", config_to_dict(cfg),
                          append=True)
    rows = []
    for seed in _seeds(cfg):
        run_cfg = cfg.with_seed(seed)
        dataset = resolve_dataset(run_cfg)
        prepared = prepare(run_cfg, dataset)
        monitor.log(f"Абляція {cfg.variant}, зерно {seed}")
        metrics = fit_and_evaluate(run_cfg, prepared, cfg.variant, monitor)
        writer.add("ablate", cfg.variant, seed, metrics)
        rows.append(metrics)
    if len(rows) > 1:
        writer.add_median("ablate", cfg.variant, rows, _metric_keys(cfg))
    path = writer.write()

    print_metrics(f"Абляція {cfg.variant} (зерно {cfg.seed})", rows[0])
    print(f"Звіт збережено: {path}")
    return EXIT_OK


def sweep_settings(cfg: RunConfig) -> List[float]:
    """Значення осі перебору: n = 1..k для історії або множники довжини вікна."""
    if cfg.sweep.axis == "history-length":
        return [float(n) for n in range(1, cfg.train.window_length + 1)]
    if cfg.sweep.axis == "window-length":
        return list(cfg.sweep.window_factors)
    raise ConfigError(f"Невідома вісь перебору: {cfg.sweep.axis}")


def cmd_sweep(cfg: RunConfig) -> int:
    """
    Перебирає довжину вікна або історії, навчаючи одну модель на кожне значення.

    Налаштування розподіляються між робочими потоками, кожен з яких має
    власну модель; рядки додаються одним записувачем у порядку налаштувань.
    """
    monitor = _monitor(cfg)
    axis = cfg.sweep.axis
    settings = sweep_settings(cfg)
    tasks = [(setting, seed) for setting in settings for seed in _seeds(cfg)]
    datasets = {seed: resolve_dataset(cfg.with_seed(seed)) for seed in _seeds(cfg)}
    for dataset in datasets.values():
        protocol(dataset.n_windows, cfg.train.window_length)

    def run(task: Tuple[float, int]) -> Dict[str, float]:
        setting, seed = task
        run_cfg = cfg.with_seed(seed)
        if axis == "history-length":
            prepared = prepare(run_cfg, datasets[seed], history=int(setting))
        else:
            prepared = prepare(run_cfg, datasets[seed], factor=setting)
        monitor.log(f"Перебір {axis}={setting:g}, зерно {seed}: {prepared.train_net.k} знімків")
        return fit_and_evaluate(run_cfg, prepared, cfg.variant, monitor)

    with ThreadPoolExecutor(max_workers=cfg.sweep.workers) as executor:
        results = list(executor.map(run, tasks))

    writer = ReportWriter(cfg.paths.report_path / "sweep.csv", config_to_dict(cfg))
    keys = _metric_keys(cfg)
    headline = "ndcg@50" if "ndcg@50" in keys else keys[0]
    print(f"Перебір {axis}:")
    for setting in settings:
        rows = []
        for (task_setting, seed), metrics in zip(tasks, results):
            if task_setting == setting:
                writer.add(f"sweep-{axis}", cfg.variant, seed, metrics, axis=axis,
                           setting=setting)
                rows.append(metrics)
        if len(rows) > 1:
            writer.add_median(f"sweep-{axis}", cfg.variant, rows, keys, axis=axis,
                              setting=setting)
        median = float(np.median([row[headline] for row in rows]))
        print(f"  {setting:>6g}  {headline} {median:.4f}")
    path = writer.write()
    print()
    print(f"Звіт збережено: {path}")
    return EXIT_OK


def gradcheck_network(rng: np.random.Generator) -> TemporalNetwork:
    """Крихітна мережа з двох знімків із випадковими ознаками повної ширини."""
    nodes = tuple(
        [NodeRef(NodeKind.INFLUENCER, f"u{i}") for i in range(GRADCHECK_INFLUENCERS)]
        + [NodeRef(NodeKind.HASHTAG, f"#h{i}") for i in range(GRADCHECK_AUXILIARY)]
    )
    snapshots = []
    for window in range(2):
        edges = []
        for source in range(GRADCHECK_INFLUENCERS):
            for target in range(GRADCHECK_INFLUENCERS, len(nodes)):
                if rng.random() < 0.6:
                    edges.append(Edge(source, target, 1, 1.0))
        features = rng.standard_normal((len(nodes), DEFAULT_LAYOUT.width))
        snapshots.append(Snapshot(window, nodes, tuple(edges), features))
    return align(snapshots)


def cmd_gradcheck(cfg: RunConfig) -> int:
    """
    Порівнює градієнти стрічки зі скінченними різницями на повній моделі.

    Raises:
        ConfigError: Якщо --corrupt-gradient називає невідомий параметр
        NumericalError: Якщо похибка якогось параметра перевищує допуск
    """
    monitor = _monitor(cfg)
    rng = np.random.default_rng([cfg.seed, 6])
    net = gradcheck_network(rng)
    model_cfg = ModelConfig(d_embed=GRADCHECK_DIM, gcn_layers=2, gcn_hidden=GRADCHECK_DIM,
                            gru_hidden=GRADCHECK_DIM, mlp_hidden=GRADCHECK_DIM,
                            dropout=0.0, seed=cfg.seed)
    params = init_params(model_cfg, ModelVariant.FULL, DEFAULT_LAYOUT.width)
    rates = rng.random(len(net.influencer_ids)).tolist()
    ids = list(net.influencer_ids)

    def loss_fn(tape, nodes):
        return listmle_loss(forward(net, nodes, "eval"), rates, ids)

    hook = None
    if cfg.corrupt_gradient is not None:
        name = cfg.corrupt_gradient
        if name not in params:
            raise ConfigError(
                f"Невідомий параметр: {name}. Доступні варіанти: {', '.join(sorted(params))}"
            )

        def hook(grads):
            corrupted = dict(grads)
            corrupted[name] = grads[name] + 1.0
            return corrupted

    errors = finite_diff_errors(params, loss_fn, grad_hook=hook)
    for name, error in errors.items():
        monitor.log(f"{name:<10} {error:.3e}")
    worst = max(errors, key=errors.get)

    print("Перевірка градієнтів:")
    print(f"  Параметрів: {len(params)}")
    print(f"  Найбільша похибка: {errors[worst]:.3e} ({worst})")
    print(f"  Допуск: {GRADCHECK_TOLERANCE:.0e}")
    if errors[worst] >= GRADCHECK_TOLERANCE:
        raise NumericalError(
            f"Перевірка градієнтів не пройдена: параметр {worst}, "
            f"відносна похибка {errors[worst]:.3e}"
        )
    print("  Результат: пройдено")
    return EXIT_OK


COMMAND_HANDLERS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "sweep": cmd_sweep,
    "gradcheck": cmd_gradcheck,
}
